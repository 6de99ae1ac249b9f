#include "qclab/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "qclab/errors.hpp"

namespace qclab {

QcMesh::QcMesh(int M, int N, int K, std::vector<int> indices) : M_(M), N_(N), K_(K), ell_(std::move(indices)) {
  auto bad = [&](const std::string& why) {
    std::ostringstream msg;
    msg << "invalid mesh (M=" << M_ << ", N=" << N_ << ", K=" << K_ << "): " << why;
    return MeshError(msg.str());
  };
  if (N_ < 1) throw bad("need N >= 1");
  if (K_ < 0 || K_ > N_ + 1) throw bad("need 0 <= K <= N+1");
  if (ell_.size() != static_cast<std::size_t>(2 * N_ + 2)) throw bad("ell must list 2N+2 entries");
  if (ell(-N_) != -M_) throw bad("ell(-N) must equal -M");
  if (ell(N_ + 1) != M_ + 1) throw bad("ell(N+1) must equal M+1");
  for (int j = -N_; j <= N_; ++j)
    if (nu(j) < 1) throw bad("ell must be strictly increasing");
  for (int j = -N_; j <= N_ + 1; ++j)
    if (ell(1 - j) != 1 - ell(j)) throw bad("layout must be mirror symmetric about the chain center");
  for (int j = std::max(-K_ - 1, -N_); j <= std::min(K_ + 1, N_); ++j)
    if (nu(j) != 1) throw bad("elements -K-1..K+1 must be unit elements");
}

QcMesh QcMesh::uniform(int N, int K) {
  std::vector<int> ell;
  for (int j = -N; j <= N + 1; ++j) ell.push_back(j);
  return QcMesh(N, N, K, std::move(ell));
}

QcMesh QcMesh::coarsened(int M, int N, int K) {
  if (M < N) throw MeshError("coarsened mesh needs M >= N");
  if (K + 1 > N) {
    if (M != N) throw MeshError("no continuum elements left to coarsen; need M = N");
    return uniform(N, K);
  }
  // Left side: elements -N..-K-2 cover atoms -M..-K-1.
  const int elements = N - K - 1;
  const int atoms = M - K - 1;
  std::vector<int> left;  // ell(-N)..ell(-K-1)
  if (elements == 0) {
    if (atoms != 0) throw MeshError("no continuum elements left to coarsen; need M = N");
    left.push_back(-K - 1);
  } else {
    const int base = atoms / elements;
    const int extra = atoms % elements;
    int pos = -M;
    left.push_back(pos);
    // the widest elements go to the outer end
    for (int e = 0; e < elements; ++e) {
      pos += base + (e < extra ? 1 : 0);
      left.push_back(pos);
    }
  }
  std::vector<int> ell(static_cast<std::size_t>(2 * N + 2));
  for (int j = -N; j <= -K - 1; ++j) ell[static_cast<std::size_t>(j + N)] = left[static_cast<std::size_t>(j + N)];
  for (int j = -K; j <= K + 1; ++j) ell[static_cast<std::size_t>(j + N)] = j;
  for (int j = K + 2; j <= N + 1; ++j) ell[static_cast<std::size_t>(j + N)] = 1 - ell[static_cast<std::size_t>(1 - j + N)];
  return QcMesh(M, N, K, std::move(ell));
}

QcMesh QcMesh::from_indices(int M, int K, std::vector<int> ell) {
  if (ell.size() < 4 || ell.size() % 2 != 0) throw MeshError("ell must list 2N+2 entries with N >= 1");
  const int N = static_cast<int>(ell.size()) / 2 - 1;
  return QcMesh(M, N, K, std::move(ell));
}

RepState RepState::uniform(const QcMesh& m, double spacing) {
  RepState st{IndexedVector(-m.N(), m.N() + 1)};
  for (int j = -m.N(); j <= m.N() + 1; ++j) st.z(j) = m.ell(j) * spacing;
  return st;
}

RepState RepState::from_spacings(const QcMesh& m, const Spacings& r, double z_end) {
  RepState st{IndexedVector(-m.N(), m.N() + 1)};
  st.z(m.N() + 1) = z_end;
  for (int j = m.N(); j >= -m.N(); --j) st.z(j) = st.z(j + 1) - m.nu(j) * r(j);
  return st;
}

Spacings RepState::spacings(const QcMesh& m) const {
  Spacings r(-m.N(), m.N());
  for (int j = -m.N(); j <= m.N(); ++j) r(j) = (z(j + 1) - z(j)) / m.nu(j);
  return r;
}

IndexedVector RepState::deformation_gradients(const QcMesh& m, double a0) const {
  IndexedVector D = spacings(m);
  for (double& d : D.values()) d /= a0;
  return D;
}

Spacings uniform_spacings(const QcMesh& m, double spacing) { return Spacings(-m.N(), m.N(), spacing); }

namespace {

std::string shortest(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

double parse_double(const std::string& tok) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw MeshError("bad number in mesh file: " + tok);
  return v;
}

std::string next_content_line(std::istream& is) {
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    return line;
  }
  throw MeshError("mesh file ended early");
}

}  // namespace

void write_mesh_state(std::ostream& os, const QcMesh& m, const RepState& st) {
  os << "# M N K\n" << m.M() << ' ' << m.N() << ' ' << m.K() << '\n';
  os << "# ell(-N)..ell(N+1)\n";
  for (std::size_t i = 0; i < m.indices().size(); ++i) os << (i ? " " : "") << m.indices()[i];
  os << "\n# z(-N)..z(N+1)\n";
  for (std::size_t i = 0; i < st.z.size(); ++i) os << (i ? " " : "") << shortest(st.z.values()[i]);
  os << '\n';
}

std::pair<QcMesh, RepState> read_mesh_state(std::istream& is) {
  int M = 0, N = 0, K = 0;
  {
    std::istringstream hdr(next_content_line(is));
    if (!(hdr >> M >> N >> K)) throw MeshError("mesh header must be 'M N K'");
  }
  std::vector<int> ell;
  {
    std::istringstream line(next_content_line(is));
    int v = 0;
    while (line >> v) ell.push_back(v);
  }
  QcMesh mesh = QcMesh::from_indices(M, K, std::move(ell));
  if (mesh.N() != N) throw MeshError("ell list length disagrees with N");
  std::vector<double> z;
  {
    std::istringstream line(next_content_line(is));
    std::string tok;
    while (line >> tok) z.push_back(parse_double(tok));
  }
  if (z.size() != static_cast<std::size_t>(2 * N + 2)) throw MeshError("z list must have 2N+2 entries");
  return {mesh, RepState{IndexedVector(-N, std::move(z))}};
}

}  // namespace qclab
