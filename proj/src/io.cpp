#include "sppm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sppm::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  if (s == "NA" || s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": cannot parse '" + s + "' as a number");
  return v;
}

std::string labelled(const std::string& prefix, std::size_t i) { return prefix + std::to_string(i + 1); }

}  // namespace

int Table::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == name) return static_cast<int>(j);
  return -1;
}

std::vector<double> Table::column_values(const std::string& name) const {
  const int j = column(name);
  if (j < 0) throw std::runtime_error("missing column '" + name + "'");
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r[static_cast<std::size_t>(j)]);
  return v;
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(t.header.size()) + " fields, found " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, path, lineno));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw std::runtime_error(path.string() + ": empty file");
  return t;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_table(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t j = 0; j < table.header.size(); ++j) out << (j ? "," : "") << table.header[j];
  out << '\n';
  for (const auto& r : table.rows) {
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << format_double(r[j]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_text_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << r[j];
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

SiteData read_sites(const std::filesystem::path& path, bool require_response) {
  const Table t = read_table(path);
  SiteData d;
  const auto s1 = t.column_values("s1");
  const auto s2 = t.column_values("s2");
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  for (std::size_t i = 0; i < s1.size(); ++i) d.coords.push_back({s1[i], s2[i]});
  std::vector<std::string> ycols;
  if (t.column("y") >= 0) ycols = {"y"};
  else if (t.column("y1") >= 0 && t.column("y2") >= 0) ycols = {"y1", "y2"};
  else if (t.column("y1") >= 0) ycols = {"y1"};
  if (ycols.empty() && require_response) throw std::runtime_error(path.string() + ": needs a y column or y1, y2 columns");
  d.y.resize(n, static_cast<Eigen::Index>(ycols.size()));
  for (std::size_t j = 0; j < ycols.size(); ++j) {
    const auto v = t.column_values(ycols[j]);
    for (Eigen::Index i = 0; i < n; ++i) d.y(i, static_cast<Eigen::Index>(j)) = v[static_cast<std::size_t>(i)];
  }
  std::vector<std::vector<double>> xs;
  for (std::size_t j = 0; t.column(labelled("x", j)) >= 0; ++j) xs.push_back(t.column_values(labelled("x", j)));
  d.x.resize(n, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t j = 0; j < xs.size(); ++j)
    for (Eigen::Index i = 0; i < n; ++i) d.x(i, static_cast<Eigen::Index>(j)) = xs[j][static_cast<std::size_t>(i)];
  return d;
}

void write_sites(const std::filesystem::path& path, const SiteData& d) {
  Table t;
  t.header = {"s1", "s2"};
  if (d.y.cols() == 1) t.header.push_back("y");
  if (d.y.cols() == 2) t.header.insert(t.header.end(), {"y1", "y2"});
  for (Eigen::Index j = 0; j < d.x.cols(); ++j) t.header.push_back(labelled("x", static_cast<std::size_t>(j)));
  for (std::size_t i = 0; i < d.coords.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    std::vector<double> row{d.coords[i].x, d.coords[i].y};
    for (Eigen::Index j = 0; j < d.y.cols(); ++j) row.push_back(d.y(r, j));
    for (Eigen::Index j = 0; j < d.x.cols(); ++j) row.push_back(d.x(r, j));
    t.rows.push_back(std::move(row));
  }
  write_table(path, t);
}

void write_partition(const std::filesystem::path& path, const Partition& p) {
  Table t;
  std::vector<double> row;
  for (std::size_t i = 0; i < p.size(); ++i) {
    t.header.push_back(labelled("c", i));
    row.push_back(p.label(i) + 1);
  }
  t.rows.push_back(std::move(row));
  write_table(path, t);
}

Partition read_partition(const std::filesystem::path& path) {
  const Table t = read_table(path);
  if (t.rows.size() != 1) throw std::runtime_error(path.string() + ": expected a single row of labels");
  std::vector<int> labels;
  for (double v : t.rows.front()) {
    if (!(v >= 1.0) || v != std::floor(v)) throw std::runtime_error(path.string() + ": labels must be positive integers");
    labels.push_back(static_cast<int>(v));
  }
  return Partition(labels);
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m, const std::string& prefix) {
  Table t;
  for (Eigen::Index j = 0; j < m.cols(); ++j) t.header.push_back(labelled(prefix, static_cast<std::size_t>(j)));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    t.rows.push_back(std::move(row));
  }
  write_table(path, t);
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  const Table t = read_table(path);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < t.header.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.rows[i][j];
  return m;
}

namespace {

std::vector<int> labels_from(const Table& t, std::size_t row, std::size_t first, std::size_t n) {
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(t.rows[row][first + i]);
  return labels;
}

std::size_t count_prefixed(const Table& t, const std::string& prefix) {
  std::size_t n = 0;
  while (t.column(labelled(prefix, n)) >= 0) ++n;
  return n;
}

}  // namespace

void write_cps_samples(const std::filesystem::path& path, const CpsSamples& s) {
  Table t;
  const std::size_t n = s.partitions.empty() ? 0 : s.partitions.front().size();
  const std::size_t p = s.params.empty() ? 0 : static_cast<std::size_t>(s.params.front().beta.size());
  t.header = {"draw", "k", "sigma2", "mu0", "sigma0"};
  for (std::size_t j = 0; j < p; ++j) t.header.push_back(labelled("beta", j));
  for (std::size_t i = 0; i < n; ++i) t.header.push_back(labelled("c", i));
  for (std::size_t i = 0; i < n; ++i) t.header.push_back(labelled("mu", i));
  for (std::size_t d = 0; d < s.num_draws(); ++d) {
    const auto& par = s.params[d];
    const auto& part = s.partitions[d];
    std::vector<double> row{static_cast<double>(d + 1), static_cast<double>(part.num_clusters()), par.sigma * par.sigma,
                            par.mu0, par.sigma0};
    for (std::size_t j = 0; j < p; ++j) row.push_back(par.beta(static_cast<Eigen::Index>(j)));
    for (std::size_t i = 0; i < n; ++i) row.push_back(part.label(i) + 1);
    for (std::size_t i = 0; i < n; ++i) row.push_back(par.mu_star[static_cast<std::size_t>(part.label(i))]);
    t.rows.push_back(std::move(row));
  }
  write_table(path, t);
}

CpsSamples read_cps_samples(const std::filesystem::path& path) {
  const Table t = read_table(path);
  const std::size_t n = count_prefixed(t, "c");
  const std::size_t p = count_prefixed(t, "beta");
  const auto c0 = static_cast<std::size_t>(t.column("c1"));
  const auto m0 = static_cast<std::size_t>(t.column("mu1"));
  if (n == 0 || t.column("mu1") < 0) throw std::runtime_error(path.string() + ": not a CPS samples file");
  CpsSamples s;
  for (std::size_t d = 0; d < t.rows.size(); ++d) {
    const auto& r = t.rows[d];
    Partition part(labels_from(t, d, c0, n));
    CpsDraw draw;
    draw.sigma = std::sqrt(r[static_cast<std::size_t>(t.column("sigma2"))]);
    draw.mu0 = r[static_cast<std::size_t>(t.column("mu0"))];
    draw.sigma0 = r[static_cast<std::size_t>(t.column("sigma0"))];
    draw.beta.resize(static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) draw.beta(static_cast<Eigen::Index>(j)) = r[static_cast<std::size_t>(t.column(labelled("beta", j)))];
    draw.mu_star.assign(static_cast<std::size_t>(part.num_clusters()), 0.0);
    for (std::size_t i = 0; i < n; ++i) draw.mu_star[static_cast<std::size_t>(part.label(i))] = r[m0 + i];
    s.partitions.push_back(std::move(part));
    s.params.push_back(std::move(draw));
  }
  return s;
}

void write_joint_samples(const std::filesystem::path& path, const JointSamples& s) {
  Table t;
  const std::size_t n = s.partitions.empty() ? 0 : s.partitions.front().size();
  const bool latent = !s.params.empty() && s.params.front().latent.size() > 0;
  t.header = {"draw", "k", "mu0_1", "mu0_2", "sigma_11", "sigma_12", "sigma_22", "t_11", "t_12", "t_22",
              "tau2_1", "tau2_2", "phi_1", "phi_2", "gamma"};
  for (std::size_t i = 0; i < n; ++i) t.header.push_back(labelled("c", i));
  for (std::size_t i = 0; i < n; ++i) t.header.push_back(labelled("mu1_", i));
  for (std::size_t i = 0; i < n; ++i) t.header.push_back(labelled("mu2_", i));
  if (latent) {
    for (std::size_t i = 0; i < n; ++i) t.header.push_back(labelled("lat1_", i));
    for (std::size_t i = 0; i < n; ++i) t.header.push_back(labelled("lat2_", i));
  }
  for (std::size_t d = 0; d < s.num_draws(); ++d) {
    const auto& q = s.params[d];
    const auto& part = s.partitions[d];
    std::vector<double> row{static_cast<double>(d + 1), static_cast<double>(part.num_clusters()), q.mu0(0), q.mu0(1),
                            q.sigma(0, 0), q.sigma(0, 1), q.sigma(1, 1), q.t(0, 0), q.t(0, 1), q.t(1, 1),
                            q.tau2(0), q.tau2(1), q.phi(0), q.phi(1), q.gamma};
    for (std::size_t i = 0; i < n; ++i) row.push_back(part.label(i) + 1);
    for (int j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < n; ++i) row.push_back(q.mu_star[static_cast<std::size_t>(part.label(i))](j));
    if (latent)
      for (int j = 0; j < 2; ++j)
        for (std::size_t i = 0; i < n; ++i) row.push_back(q.latent(static_cast<Eigen::Index>(i), j));
    t.rows.push_back(std::move(row));
  }
  write_table(path, t);
}

JointSamples read_joint_samples(const std::filesystem::path& path) {
  const Table t = read_table(path);
  const std::size_t n = count_prefixed(t, "c");
  if (n == 0 || t.column("mu1_1") < 0) throw std::runtime_error(path.string() + ": not a joint samples file");
  const bool latent = t.column("lat1_1") >= 0;
  auto col = [&](const std::string& name) { return static_cast<std::size_t>(t.column(name)); };
  const std::size_t c0 = col("c1"), m1 = col("mu1_1"), m2 = col("mu2_1");
  JointSamples s;
  for (std::size_t d = 0; d < t.rows.size(); ++d) {
    const auto& r = t.rows[d];
    Partition part(labels_from(t, d, c0, n));
    JointDraw q;
    q.mu0 << r[col("mu0_1")], r[col("mu0_2")];
    q.sigma << r[col("sigma_11")], r[col("sigma_12")], r[col("sigma_12")], r[col("sigma_22")];
    q.t << r[col("t_11")], r[col("t_12")], r[col("t_12")], r[col("t_22")];
    q.tau2 << r[col("tau2_1")], r[col("tau2_2")];
    q.phi << r[col("phi_1")], r[col("phi_2")];
    q.gamma = r[col("gamma")];
    q.mu_star.assign(static_cast<std::size_t>(part.num_clusters()), Eigen::Vector2d::Zero());
    for (std::size_t i = 0; i < n; ++i) q.mu_star[static_cast<std::size_t>(part.label(i))] << r[m1 + i], r[m2 + i];
    if (latent) {
      const std::size_t l1 = col("lat1_1"), l2 = col("lat2_1");
      q.latent.resize(static_cast<Eigen::Index>(n), 2);
      for (std::size_t i = 0; i < n; ++i) {
        q.latent(static_cast<Eigen::Index>(i), 0) = r[l1 + i];
        q.latent(static_cast<Eigen::Index>(i), 1) = r[l2 + i];
      }
    }
    s.partitions.push_back(std::move(part));
    s.params.push_back(std::move(q));
  }
  return s;
}

}  // namespace sppm::io
