#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sppm/cps.hpp"
#include "sppm/joint.hpp"
#include "sppm/point.hpp"
#include "sppm/spatial_partition.hpp"

namespace sppm::io {

/// Comma-separated numeric table with a header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column, or -1.
  int column(const std::string& name) const;
  /// Throws std::runtime_error when the column is missing.
  std::vector<double> column_values(const std::string& name) const;
};

/// Reads a numeric CSV. Blank lines are skipped; "NA" parses as NaN.
/// Throws std::runtime_error on I/O failure or malformed content.
Table read_table(const std::filesystem::path& path);
void write_table(const std::filesystem::path& path, const Table& table);

/// Writes a header and rows of preformatted cells.
void write_text_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Site data: columns s1, s2, then y or y1, y2, then optional x1..xp.
struct SiteData {
  std::vector<Point> coords;
  Eigen::MatrixXd y;  // n x 0, 1 or 2
  Eigen::MatrixXd x;  // n x p
};

/// `require_response` rejects files without y / y1,y2 columns.
SiteData read_sites(const std::filesystem::path& path, bool require_response = true);
void write_sites(const std::filesystem::path& path, const SiteData& data);

/// One header row c1..cn and one row of 1-based labels.
void write_partition(const std::filesystem::path& path, const Partition& p);
Partition read_partition(const std::filesystem::path& path);

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m, const std::string& prefix);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

void write_cps_samples(const std::filesystem::path& path, const CpsSamples& s);
/// Rebuilds draws written by write_cps_samples (the log-likelihood matrix is
/// left empty).
CpsSamples read_cps_samples(const std::filesystem::path& path);

void write_joint_samples(const std::filesystem::path& path, const JointSamples& s);
JointSamples read_joint_samples(const std::filesystem::path& path);

}  // namespace sppm::io
