#include "rebound/posterior_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "rebound/errors.hpp"

namespace rebound {

namespace {

constexpr char kMagic[8] = {'R', 'E', 'B', 'O', 'U', 'N', 'D', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.write(b, 4);
}

void put_i32(std::ostream& out, std::int32_t v) { put_u32(out, static_cast<std::uint32_t>(v)); }

std::uint32_t get_u32(std::istream& in) {
  char b[4];
  in.read(b, 4);
  std::uint32_t v = 0;
  std::memcpy(&v, b, 4);
  return v;
}

std::int32_t get_i32(std::istream& in) { return static_cast<std::int32_t>(get_u32(in)); }

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  // Row-major doubles; dimensions are implied by the header.
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      char b[8];
      std::memcpy(b, &v, 8);
      out.write(b, 8);
    }
  }
}

Eigen::MatrixXd get_matrix(std::istream& in, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      char b[8];
      in.read(b, 8);
      double v = 0.0;
      std::memcpy(&v, b, 8);
      m(i, j) = v;
    }
  }
  return m;
}

}  // namespace

void save_posterior(const std::string& path, const TvpPosterior& post) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("posterior: cannot write '" + path + "'");
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, 1);  // format version
  put_i32(out, post.spec.K);
  put_i32(out, post.spec.p);
  put_u32(out, post.spec.intercept ? 1 : 0);
  put_u32(out, post.est_start.freq == Frequency::monthly ? 0 : 1);
  put_i32(out, post.est_start.year);
  put_i32(out, post.est_start.sub);
  put_i32(out, post.t_est);
  put_u32(out, static_cast<std::uint32_t>(post.draws.size()));
  for (const auto& d : post.draws) {
    put_matrix(out, d.beta);
    put_matrix(out, d.alpha);
    put_matrix(out, d.logvol);
    put_matrix(out, d.q);
    put_matrix(out, d.s);
    put_matrix(out, d.w);
  }
  if (!out) throw data_error("posterior: write failed for '" + path + "'");
}

TvpPosterior load_posterior(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("posterior: cannot open '" + path + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw data_error("posterior: '" + path + "' is not a posterior file");
  }
  const std::uint32_t version = get_u32(in);
  if (version != 1) {
    throw data_error("posterior: unsupported format version " + std::to_string(version));
  }
  TvpPosterior post;
  post.spec.K = get_i32(in);
  post.spec.p = get_i32(in);
  post.spec.intercept = get_u32(in) != 0;
  const Frequency freq = get_u32(in) == 0 ? Frequency::monthly : Frequency::quarterly;
  const int year = get_i32(in);
  const int sub = get_i32(in);
  post.est_start = make_period(year, sub, freq);
  post.t_est = get_i32(in);
  const std::uint32_t n = get_u32(in);
  if (!in) throw data_error("posterior: truncated header in '" + path + "'");
  if (post.spec.K < 1 || post.spec.p < 1 || post.t_est < 1) {
    throw data_error("posterior: corrupt header in '" + path + "'");
  }
  const int n_beta = post.spec.n_beta();
  const int n_alpha = post.spec.n_alpha();
  post.draws.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    TvpDraw d;
    d.beta = get_matrix(in, post.t_est, n_beta);
    d.alpha = get_matrix(in, post.t_est, n_alpha);
    d.logvol = get_matrix(in, post.t_est, post.spec.K);
    d.q = get_matrix(in, n_beta, n_beta);
    d.s = get_matrix(in, n_alpha, n_alpha);
    d.w = get_matrix(in, post.spec.K, post.spec.K);
    if (!in) throw data_error("posterior: truncated draw data in '" + path + "'");
    post.draws.push_back(std::move(d));
  }
  return post;
}

}  // namespace rebound
