#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "qidmrg/integrals.hpp"

namespace qidmrg {

namespace {

constexpr double kDuplicateTolerance = 1e-12;

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

int to_int(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + s + "'", line);
  }
}

double to_double(std::string s, int line) {
  // Fortran writers emit 1.0D-03.
  std::replace(s.begin(), s.end(), 'D', 'E');
  std::replace(s.begin(), s.end(), 'd', 'e');
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + s + "'", line);
  }
}

struct Header {
  std::map<std::string, std::vector<std::string>> fields;
  int end_line = 0;
};

// Reads everything up to and including the &END (or '/') terminator.
Header read_header(std::istream& in, int& line_no) {
  Header h;
  std::string line;
  std::string text;
  bool started = false, finished = false;
  int first_line = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string u = upper(line);
    if (!started) {
      const auto pos = u.find("&FCI");
      if (pos == std::string::npos) {
        if (u.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ParseError("FCIDUMP must start with an &FCI header", line_no);
      }
      started = true;
      first_line = line_no;
      u = u.substr(pos + 4);
    }
    auto end = u.find("&END");
    if (end == std::string::npos) end = u.find('/');
    if (end != std::string::npos) {
      text += " " + u.substr(0, end);
      finished = true;
      break;
    }
    text += " " + u;
  }
  if (!started) throw ParseError("empty input: no &FCI header", line_no);
  if (!finished) throw ParseError("unterminated &FCI header", first_line);
  h.end_line = line_no;

  std::replace(text.begin(), text.end(), ',', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  // "KEY = V" is legal; glue the '=' onto the key first.
  std::string glued;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == ' ') {
      std::size_t j = i;
      while (j < text.size() && text[j] == ' ') ++j;
      if (j < text.size() && text[j] == '=') {
        i = j - 1;
        continue;
      }
    }
    glued += text[i];
    if (text[i] == '=') {
      while (i + 1 < text.size() && text[i + 1] == ' ') ++i;
    }
  }
  std::istringstream tokens(glued);
  std::string tok, key;
  while (tokens >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) {
      key = tok.substr(0, eq);
      if (key.empty()) throw ParseError("malformed header entry '" + tok + "'", first_line);
      auto& vals = h.fields[key];
      vals.clear();
      if (eq + 1 < tok.size()) vals.push_back(tok.substr(eq + 1));
    } else {
      if (key.empty()) throw ParseError("malformed header near '" + tok + "'", first_line);
      h.fields[key].push_back(tok);
    }
  }
  return h;
}

struct CanonicalKey {
  int i, j, k, l;
  auto operator<=>(const CanonicalKey&) const = default;
};

CanonicalKey canonical(int i, int j, int k, int l) {
  if (i < j) std::swap(i, j);
  if (k < l) std::swap(k, l);
  if (std::pair(i, j) < std::pair(k, l)) {
    std::swap(i, k);
    std::swap(j, l);
  }
  return {i, j, k, l};
}

}  // namespace

IntegralSet parse_fcidump(std::istream& in) {
  int line_no = 0;
  Header header = read_header(in, line_no);
  auto scalar = [&](const std::string& key, bool required, int fallback) {
    auto it = header.fields.find(key);
    if (it == header.fields.end()) {
      if (required) throw ParseError("header lacks " + key, header.end_line);
      return fallback;
    }
    if (it->second.size() != 1) throw ParseError("header field " + key + " must hold one value", header.end_line);
    return to_int(it->second.front(), header.end_line);
  };
  const int n = scalar("NORB", true, 0);
  if (n < 1) throw ParseError("NORB must be positive", header.end_line);
  OrbitalMeta meta;
  meta.n_orbitals = n;
  meta.n_electrons = scalar("NELEC", true, 0);
  meta.two_sz = scalar("MS2", false, 0);
  if (auto it = header.fields.find("ORBSYM"); it != header.fields.end()) {
    if (static_cast<int>(it->second.size()) != n)
      throw ParseError("ORBSYM lists " + std::to_string(it->second.size()) + " labels for NORB=" + std::to_string(n),
                       header.end_line);
    for (const auto& s : it->second) meta.irrep.push_back(to_int(s, header.end_line));
  }

  Eigen::MatrixXd one = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> two(static_cast<std::size_t>(n) * n * n * n, 0.0);
  double core = 0.0;
  std::map<CanonicalKey, double> seen;
  auto record = [&](CanonicalKey key, double v, int line) {
    auto [it, inserted] = seen.emplace(key, v);
    if (!inserted && std::abs(it->second - v) > kDuplicateTolerance)
      throw ParseError("conflicting duplicate integral entry", line);
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string vtok;
    if (!(ls >> vtok)) continue;
    const double v = to_double(vtok, line_no);
    int idx[4];
    for (int q = 0; q < 4; ++q) {
      std::string t;
      if (!(ls >> t)) throw ParseError("integral line needs a value and four indices", line_no);
      idx[q] = to_int(t, line_no);
      if (idx[q] < 0 || idx[q] > n)
        throw ParseError("orbital index " + std::to_string(idx[q]) + " out of range [1, " + std::to_string(n) + "]",
                         line_no);
    }
    std::string extra;
    if (ls >> extra) throw ParseError("trailing content '" + extra + "'", line_no);
    const auto [i, j, k, l] = idx;
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      record({0, 0, 0, 0}, v, line_no);
      core = v;
    } else if (k == 0 && l == 0) {
      if (j == 0) continue;  // orbital energy line, not part of the Hamiltonian
      if (i == 0) throw ParseError("one-body entry with a zero first index", line_no);
      record({std::max(i, j), std::min(i, j), 0, 0}, v, line_no);
      one(i - 1, j - 1) = one(j - 1, i - 1) = v;
    } else {
      if (i == 0 || j == 0 || k == 0 || l == 0) throw ParseError("two-body entry with a zero index", line_no);
      record(canonical(i, j, k, l), v, line_no);
      const int a = i - 1, b = j - 1, c = k - 1, d = l - 1;
      for (auto [p, q, r, s] : {std::array{a, b, c, d}, std::array{b, a, c, d}, std::array{a, b, d, c},
                                std::array{b, a, d, c}, std::array{c, d, a, b}, std::array{d, c, a, b},
                                std::array{c, d, b, a}, std::array{d, c, b, a}})
        two[((static_cast<std::size_t>(p) * n + q) * n + r) * n + s] = v;
    }
  }
  try {
    return IntegralSet(std::move(meta), std::move(one), std::move(two), core);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), header.end_line);
  }
}

IntegralSet parse_fcidump_string(const std::string& text) {
  std::istringstream in(text);
  return parse_fcidump(in);
}

IntegralSet read_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open FCIDUMP '" + path + "'");
  return parse_fcidump(in);
}

namespace {

void write_entry(std::ostream& out, double v, int i, int j, int k, int l) {
  std::string s = format_double(v);
  if (s.size() < 24) s.insert(0, 24 - s.size(), ' ');
  char idx[64];
  std::snprintf(idx, sizeof(idx), " %4d %4d %4d %4d\n", i, j, k, l);
  out << s << idx;
}

}  // namespace

void write_fcidump(std::ostream& out, const IntegralSet& h) {
  const int n = h.norb();
  const auto& m = h.meta();
  out << " &FCI NORB=" << n << ",NELEC=" << m.n_electrons << ",MS2=" << m.two_sz << ",\n  ORBSYM=";
  for (int i = 0; i < n; ++i) out << m.irrep[i] << ",";
  out << "\n  ISYM=1,\n &END\n";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k <= i; ++k)
        for (int l = 0; l <= k; ++l) {
          if (i * (i + 1) / 2 + j < k * (k + 1) / 2 + l) continue;
          const double v = h.two_body(i, j, k, l);
          if (v != 0.0) write_entry(out, v, i + 1, j + 1, k + 1, l + 1);
        }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      if (h.one_body(i, j) != 0.0) write_entry(out, h.one_body(i, j), i + 1, j + 1, 0, 0);
  write_entry(out, h.core_energy(), 0, 0, 0, 0);
}

std::string fcidump_string(const IntegralSet& h) {
  std::ostringstream out;
  write_fcidump(out, h);
  return out.str();
}

}  // namespace qidmrg
