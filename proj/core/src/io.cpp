#include "membrane/io.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "membrane/error.hpp"

namespace membrane::io {

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot move " + tmp.string() + ": " + ec.message());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return out.str();
}

std::string diagnostics_csv(std::span<const DiagnosticsRecord> records, int k) {
  std::ostringstream out;
  out << "t,min_indicator";
  for (int j = 1; j <= k; ++j) out << ",mean_r_" << j;
  out << ",density_spread,X_inf,Y_inf,max_speed,velocity_margin,gtt_integral\n";
  out << std::setprecision(17);
  for (const auto& r : records) {
    out << r.t << ',' << r.min_indicator;
    for (double m : r.mean_radii) out << ',' << m;
    out << ',' << r.density_spread << ',' << r.x_inf << ',' << r.y_inf << ',' << r.max_speed << ','
        << r.velocity_margin << ',' << r.gtt_integral << '\n';
  }
  return out.str();
}

std::vector<DiagnosticsRecord> parse_diagnostics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IoError, "empty diagnostics file");
  const auto columns = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  const int k = columns - 8;
  if (k < 1 || line.rfind("t,min_indicator,mean_r_1", 0) != 0) {
    throw Error(ErrorCode::IoError, "unexpected diagnostics header: " + line);
  }
  std::vector<DiagnosticsRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::IoError, "line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (static_cast<int>(v.size()) != columns) {
      throw Error(ErrorCode::IoError, "line " + std::to_string(lineno) + ": wrong column count");
    }
    DiagnosticsRecord r;
    std::size_t c = 0;
    r.t = v[c++];
    r.min_indicator = v[c++];
    for (int j = 0; j < k; ++j) r.mean_radii.push_back(v[c++]);
    r.density_spread = v[c++];
    r.x_inf = v[c++];
    r.y_inf = v[c++];
    r.max_speed = v[c++];
    r.velocity_margin = v[c++];
    r.gtt_integral = v[c++];
    out.push_back(std::move(r));
  }
  return out;
}

std::string snapshot_csv(const FieldState& state) {
  std::ostringstream out;
  out << 'y';
  for (int i = 1; i <= state.z.rows(); ++i) out << ",z_" << i;
  for (int i = 1; i <= state.r.rows(); ++i) out << ",r_" << i;
  for (int i = 1; i <= state.vz.rows(); ++i) out << ",vz_" << i;
  for (int i = 1; i <= state.vr.rows(); ++i) out << ",vr_" << i;
  out << '\n' << std::setprecision(17);
  const int n = state.n();
  for (int j = 0; j < n; ++j) {
    out << grid_point(j, n);
    for (const FieldBlock* b : {&state.z, &state.r, &state.vz, &state.vr}) {
      for (int i = 0; i < b->rows(); ++i) out << ',' << (*b)(i, j);
    }
    out << '\n';
  }
  return out.str();
}

std::string gnuplot_script(const std::vector<std::string>& files, int k) {
  std::ostringstream out;
  out << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel 't'\n"
      << "set multiplot layout 2,1\n"
      << "set ylabel 'min indicator'\n"
      << "set logscale y\n"
      << "plot ";
  for (std::size_t f = 0; f < files.size(); ++f) {
    if (f) out << ", ";
    out << "'" << files[f] << "' using 1:2 with lines title '" << files[f] << "'";
  }
  out << "\nunset logscale y\nset ylabel 'mean radius'\nplot ";
  bool first = true;
  for (const auto& file : files) {
    for (int j = 0; j < k; ++j) {
      if (!first) out << ", ";
      first = false;
      out << "'" << file << "' using 1:" << 3 + j << " with lines title '" << file << " r_" << j + 1
          << "'";
    }
  }
  out << "\nunset multiplot\n";
  return out.str();
}

}  // namespace membrane::io
