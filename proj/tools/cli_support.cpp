#include "cli_support.hpp"

#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "polarbound/errors.hpp"

namespace polarbound::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> number_list(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_array() || v.empty()) throw ValidationError(std::string(key) + ": expected a non-empty list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw ValidationError(std::string(key) + ": entry " + std::to_string(i) + " is not a number",
                            static_cast<std::ptrdiff_t>(i));
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<Complex> complex_list(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_array() || v.empty()) throw ValidationError(std::string(key) + ": expected a non-empty list");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Json& e = v[i];
    if (e.is_number()) {
      out.emplace_back(e.get<double>(), 0.0);
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      out.emplace_back(e[0].get<double>(), e[1].get<double>());
    } else {
      throw ValidationError(std::string(key) + ": entry " + std::to_string(i) + " is neither a number nor [re, im]",
                            static_cast<std::ptrdiff_t>(i));
    }
  }
  return out;
}

SpectraRecord parse_record(std::string_view line, std::size_t lineno, std::set<std::string>& seen) {
  const Json j = Json::parse(line);
  if (!j.is_object()) throw ValidationError("expected a JSON object");
  static const std::set<std::string> known = {"id", "sigma", "sigma_tilde", "lambda", "lambda_hat", "n"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ValidationError("unknown field '" + key + "'");
  if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
    throw ValidationError("missing or empty string field 'id'");
  for (const char* key : {"sigma", "sigma_tilde"})
    if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");

  SpectraRecord rec;
  rec.line = lineno;
  rec.id = j["id"].get<std::string>();
  if (!seen.insert(rec.id).second) throw ValidationError("duplicate id '" + rec.id + "'");
  rec.sigma = number_list(j, "sigma");
  rec.sigma_tilde = number_list(j, "sigma_tilde");
  rec.pair = validate_spectrum_pair(rec.sigma, rec.sigma_tilde);

  if (j.contains("lambda") != j.contains("lambda_hat"))
    throw ValidationError("'lambda' and 'lambda_hat' must be given together");
  if (j.contains("lambda")) {
    const auto l = complex_list(j, "lambda");
    const auto lh = complex_list(j, "lambda_hat");
    rec.eig = validate_eigen_pair(l, lh);
  }
  if (j.contains("n")) {
    if (!j["n"].is_number_unsigned() || j["n"].get<std::size_t>() == 0)
      throw ValidationError("'n' must be a positive integer");
    rec.n = j["n"].get<std::size_t>();
  }
  return rec;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string scalar_text(const Json& v) {
  if (v.is_null()) return "n/a";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return num(v.get<double>());
  if (v.is_number()) return v.dump();
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

bool is_flat(const Json& v) {
  if (!v.is_structured()) return true;
  if (!v.is_array()) return false;
  for (const auto& e : v)
    if (e.is_structured()) return false;
  return true;
}

bool is_flat_object(const Json& v) {
  if (!v.is_object()) return false;
  for (const auto& [key, value] : v.items())
    if (!is_flat(value)) return false;
  return true;
}

std::string flat_text(const Json& v);

std::string inline_object(const Json& v) {
  std::string s;
  for (const auto& [key, value] : v.items()) s += (s.empty() ? "" : ", ") + key + ": " + flat_text(value);
  return s;
}

std::string flat_text(const Json& v) {
  if (!v.is_array()) return scalar_text(v);
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + scalar_text(v[i]);
  return s + "]";
}

void render(const Json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (is_flat(value))
        out += pad + key + ": " + flat_text(value) + "\n";
      else {
        out += pad + key + ":\n";
        render(value, depth + 1, out);
      }
    }
  } else if (j.is_array()) {
    for (const auto& e : j) {
      if (is_flat(e)) {
        out += pad + "- " + flat_text(e) + "\n";
      } else if (is_flat_object(e) && e.size() <= 6) {
        out += pad + "- " + inline_object(e) + "\n";
      } else {
        out += pad + "-\n";
        render(e, depth + 1, out);
      }
    }
  } else {
    out += pad + scalar_text(j) + "\n";
  }
}

double parse_double(std::string_view tok, std::size_t lineno) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw InputError("matrix line " + std::to_string(lineno) + ": bad number '" + std::string(tok) + "'");
  return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

}  // namespace

SpectraFile parse_spectra(std::string_view text) {
  SpectraFile out;
  std::set<std::string> seen;
  std::size_t lineno = 0, pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    try {
      out.records.push_back(parse_record(line, lineno, seen));
    } catch (const Json::parse_error& e) {
      out.errors.push_back({lineno, std::string("invalid JSON: ") + e.what()});
    } catch (const std::exception& e) {
      out.errors.push_back({lineno, e.what()});
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write(const std::string& path, std::string_view content) {
  const std::string tmp = path + ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error(tmp + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error(path + ": rename failed: " + ec.message());
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string format_matrix(const DenseMatrix& a) {
  const bool real = (a.array().imag() == 0.0).all();
  std::string out = "polarbound-matrix " + std::to_string(a.rows()) + " " + std::to_string(a.cols()) +
                    (real ? " real\n" : " complex\n");
  char buf[64];
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (real)
        std::snprintf(buf, sizeof buf, "%s%.17g", j ? " " : "", a(i, j).real());
      else
        std::snprintf(buf, sizeof buf, "%s%.17g %.17g", j ? "  " : "", a(i, j).real(), a(i, j).imag());
      out += buf;
    }
    out += "\n";
  }
  return out;
}

DenseMatrix parse_matrix(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    lines.push_back(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
  }
  if (lines.empty()) throw InputError("matrix: empty file");
  const auto head = split_ws(lines[0]);
  if (head.size() != 4 || head[0] != "polarbound-matrix" || (head[3] != "real" && head[3] != "complex"))
    throw InputError("matrix line 1: expected 'polarbound-matrix <rows> <cols> <real|complex>'");
  const auto rows = static_cast<Index>(parse_double(head[1], 1));
  const auto cols = static_cast<Index>(parse_double(head[2], 1));
  if (rows < 1 || cols < 1) throw InputError("matrix line 1: dimensions must be positive");
  const bool real = head[3] == "real";
  const std::size_t per_row = static_cast<std::size_t>(cols) * (real ? 1 : 2);
  if (lines.size() < static_cast<std::size_t>(rows) + 1)
    throw InputError("matrix: expected " + std::to_string(rows) + " rows, found " + std::to_string(lines.size() - 1));
  DenseMatrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const std::size_t lineno = static_cast<std::size_t>(i) + 2;
    const auto tok = split_ws(lines[static_cast<std::size_t>(i) + 1]);
    if (tok.size() != per_row)
      throw InputError("matrix line " + std::to_string(lineno) + ": expected " + std::to_string(per_row) +
                       " numbers, found " + std::to_string(tok.size()));
    for (Index j = 0; j < cols; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      a(i, j) = real ? Complex(parse_double(tok[jj], lineno), 0.0)
                     : Complex(parse_double(tok[2 * jj], lineno), parse_double(tok[2 * jj + 1], lineno));
    }
  }
  for (std::size_t k = static_cast<std::size_t>(rows) + 1; k < lines.size(); ++k)
    if (!trim(lines[k]).empty()) throw InputError("matrix line " + std::to_string(k + 1) + ": trailing content");
  return a;
}

std::string render_text(const Json& report) {
  std::string out;
  render(report, 0, out);
  return out;
}

}  // namespace polarbound::cli
