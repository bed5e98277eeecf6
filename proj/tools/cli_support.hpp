#pragma once

// File formats and report plumbing shared by the command-line tool and its
// tests.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "polarbound/linalg.hpp"
#include "polarbound/spectra.hpp"

namespace polarbound::cli {

using Json = nlohmann::ordered_json;

/// Thrown for unreadable or malformed input files; maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One line of a spectra file (JSON Lines):
///   {"id": "...", "sigma": [...], "sigma_tilde": [...],
///    "lambda": [...], "lambda_hat": [...], "n": 3}
/// Eigenvalues are numbers or [re, im] pairs; the last three keys are
/// optional. Blank lines and lines starting with '#' are skipped.
struct SpectraRecord {
  std::string id;
  std::size_t line = 0;
  std::vector<double> sigma;
  std::vector<double> sigma_tilde;
  SpectrumPair pair;
  std::optional<EigenPair> eig;
  std::optional<std::size_t> n;
};

struct RecordError {
  std::size_t line = 0;
  std::string message;
};

struct SpectraFile {
  std::vector<SpectraRecord> records;
  std::vector<RecordError> errors;
};

SpectraFile parse_spectra(std::string_view text);

std::string read_file(const std::string& path);

/// Writes to a sibling temporary file, then renames over `path`.
void atomic_write(const std::string& path, std::string_view content);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Matrix file: a header line "polarbound-matrix <rows> <cols> <real|complex>"
/// followed by one line per row, entries (or re im pairs) printed with 17
/// significant digits so a reload is bit-exact.
std::string format_matrix(const DenseMatrix& a);
DenseMatrix parse_matrix(std::string_view text);

/// Indented key: value rendering of a report for humans.
std::string render_text(const Json& report);

}  // namespace polarbound::cli
