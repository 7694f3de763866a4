#include "qidmrg/reports.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qidmrg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw std::invalid_argument("invalid value '" + text + "' for " + key);
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw std::invalid_argument("invalid value '" + text + "' for " + key);
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out + '\n';
}

std::string num(double v) { return format_double(v); }
std::string num(int v) { return std::to_string(v); }

nlohmann::json bond_json(const BondSpace& b) {
  nlohmann::json q = nlohmann::json::array();
  for (const auto& x : b.qn) q.push_back({x.n, x.sz2});
  return {{"qn", q}, {"dim", b.dim}};
}

BondSpace bond_from_json(const nlohmann::json& j) {
  BondSpace b;
  for (const auto& q : j.at("qn")) b.qn.push_back({q.at(0).get<int>(), q.at(1).get<int>()});
  b.dim = j.at("dim").get<std::vector<int>>();
  if (b.dim.size() != b.qn.size()) throw std::runtime_error("checkpoint: bond labels and dimensions differ");
  return b;
}

}  // namespace

std::vector<std::string> RunConfig::keys() {
  return {"input",        "nelec",          "two_sz",         "chi",           "m_min",
          "m_start",      "m_cap",          "max_sweeps",     "convergence_tol", "solver_tol",
          "eta",          "ordering",       "ordering_file",  "warmup",        "ci_level_cap",
          "active_budget", "constrain_irreps", "explore_chi", "explore_m_min", "explore_sweeps",
          "seed",         "output",         "threads"};
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "input") input = v;
  else if (key == "nelec") nelec = parse_number<int>(key, v);
  else if (key == "two_sz") two_sz = parse_number<int>(key, v);
  else if (key == "chi") chi = parse_number<double>(key, v);
  else if (key == "m_min") m_min = parse_number<int>(key, v);
  else if (key == "m_start") m_start = parse_number<int>(key, v);
  else if (key == "m_cap") m_cap = parse_number<int>(key, v);
  else if (key == "max_sweeps") max_sweeps = parse_number<int>(key, v);
  else if (key == "convergence_tol") convergence_tol = parse_number<double>(key, v);
  else if (key == "solver_tol") solver_tol = parse_number<double>(key, v);
  else if (key == "eta") eta = parse_number<double>(key, v);
  else if (key == "ordering") ordering = v;
  else if (key == "ordering_file") ordering_file = v;
  else if (key == "warmup") warmup = v;
  else if (key == "ci_level_cap") ci_level_cap = parse_number<int>(key, v);
  else if (key == "active_budget") active_budget = parse_number<int>(key, v);
  else if (key == "constrain_irreps") constrain_irreps = parse_bool(key, v);
  else if (key == "explore_chi") explore_chi = parse_number<double>(key, v);
  else if (key == "explore_m_min") explore_m_min = parse_number<int>(key, v);
  else if (key == "explore_sweeps") explore_sweeps = parse_number<int>(key, v);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, v);
  else if (key == "output") output = v;
  else if (key == "threads") threads = parse_number<int>(key, v);
  else throw std::invalid_argument("unknown setting '" + key + "'");
}

void RunConfig::validate() const {
  sweep().validate();
  CostParams{eta}.validate();
  cideas::WarmupConfig{ci_level_cap, m_start, active_budget}.validate();
  if (ordering != "energetic" && ordering != "file" && ordering != "auto")
    throw std::invalid_argument("ordering must be energetic, file or auto");
  if (ordering == "file" && ordering_file.empty()) throw std::invalid_argument("ordering=file needs ordering_file");
  if (warmup != "cideas" && warmup != "cas-bootstrap" && warmup != "naive")
    throw std::invalid_argument("warmup must be cideas, cas-bootstrap or naive");
  if (!(explore_chi > 0.0) || explore_m_min < 1 || explore_sweeps < 1)
    throw std::invalid_argument("exploratory settings must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
}

SweepConfig RunConfig::sweep() const {
  SweepConfig s;
  s.chi = chi;
  s.m_min = m_min;
  s.m_start = m_start;
  s.m_cap = m_cap;
  s.max_sweeps = max_sweeps;
  s.convergence_tol = convergence_tol;
  s.solver_tol = solver_tol;
  s.n_electrons = nelec;
  s.two_sz = two_sz;
  return s;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = {{"input", input},
                      {"chi", chi},
                      {"m_min", m_min},
                      {"m_start", m_start},
                      {"m_cap", m_cap},
                      {"max_sweeps", max_sweeps},
                      {"convergence_tol", convergence_tol},
                      {"solver_tol", solver_tol},
                      {"eta", eta},
                      {"ordering", ordering},
                      {"ordering_file", ordering_file},
                      {"warmup", warmup},
                      {"ci_level_cap", ci_level_cap},
                      {"active_budget", active_budget},
                      {"constrain_irreps", constrain_irreps},
                      {"explore_chi", explore_chi},
                      {"explore_m_min", explore_m_min},
                      {"explore_sweeps", explore_sweeps},
                      {"seed", seed}};
  j["nelec"] = nelec ? nlohmann::json(*nelec) : nlohmann::json(nullptr);
  j["two_sz"] = two_sz ? nlohmann::json(*two_sz) : nlohmann::json(nullptr);
  return j;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    try {
      if (eq == std::string::npos) throw std::invalid_argument("expected key = value");
      cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path + ":" + std::to_string(no) + ": " + e.what());
    }
  }
}

std::string format_vector_block(const std::string& key, const std::vector<int>& v) {
  std::string out = key + " = [";
  const std::string pad(out.size(), ' ');
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0 && i % 15 == 0) out += "\n" + pad;
    out += ' ' + std::to_string(v[i] + 1);
  }
  return out + " ]\n";
}

Permutation read_ordering_file(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ordering file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  // Only the ORD block counts when a CASV block follows.
  if (const auto ord = text.find("ORD"); ord != std::string::npos) {
    const auto open = text.find('[', ord), close = text.find(']', ord);
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw std::runtime_error(path + ": malformed ORD block");
    text = text.substr(open + 1, close - open - 1);
  }
  for (char& c : text)
    if (c == ',') c = ' ';
  std::istringstream tokens(text);
  std::vector<int> image;
  std::string tok;
  while (tokens >> tok) image.push_back(parse_number<int>("ordering", tok) - 1);
  Permutation p{image};
  if (p.size() != n || !p.is_valid())
    throw std::runtime_error(path + ": ordering is not a permutation of 1.." + std::to_string(n));
  return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  write_text(path, out);
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(parse_number<double>("matrix entry", trim(cell)));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ":" + std::to_string(no) + ": " + e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n)
      throw std::invalid_argument(path + ": matrix is not square (row " + std::to_string(i + 1) + ")");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::string energy_trace_csv(const DmrgResult& r) {
  std::string out = "half_sweep,direction,energy\n";
  for (std::size_t k = 0; k < r.half_sweep_energy.size(); ++k)
    out += csv_row({num(static_cast<int>(k)), k % 2 == 0 ? "right" : "left", num(r.half_sweep_energy[k])});
  return out;
}

std::string steps_csv(const DmrgResult& r) {
  std::string out = "half_sweep,position,direction,energy,residual,iterations,superblock_dim,bond_dim\n";
  for (const auto& s : r.steps)
    out += csv_row({num(s.half_sweep), num(s.position + 1), s.left_to_right ? "right" : "left", num(s.energy),
                    num(s.residual), num(s.iterations), num(s.superblock_dim), num(s.bond_dim)});
  return out;
}

std::string block_entropy_csv(const DmrgResult& r) {
  std::string out = "sweep,l,entropy\n";
  for (std::size_t k = 0; k < r.block_entropy.size(); ++k)
    for (std::size_t l = 0; l < r.block_entropy[k].size(); ++l)
      out += csv_row({num(static_cast<int>(k)), num(static_cast<int>(l)), num(r.block_entropy[k][l])});
  return out;
}

std::string truncation_csv(const DmrgResult& r) {
  std::string out =
      "half_sweep,cut,available,kept,entropy_before,entropy_after,info_loss,discarded_weight,m_used,clamped\n";
  for (const auto& t : r.truncations)
    out += csv_row({num(t.half_sweep), num(t.cut), num(t.available), num(t.kept), num(t.entropy_before),
                    num(t.entropy_after), num(t.info_loss), num(t.discarded_weight), num(t.m_used),
                    t.clamped ? "1" : "0"});
  return out;
}

std::string site_entropy_csv(const MutualInfoMatrix& info, const std::vector<int>& bonds) {
  std::string out = "orbital,s1,bonds\n";
  for (int i = 0; i < info.n; ++i) out += csv_row({num(i + 1), num(info.s1[i]), num(bonds[i])});
  return out;
}

nlohmann::json ordering_json(const OrderingResult& r, const CostParams& params) {
  std::vector<int> perm;
  for (int v : r.permutation.image) perm.push_back(v + 1);
  nlohmann::json j = {{"method", to_string(r.method)}, {"perm", perm}, {"cost", r.cost}, {"eta", params.eta}};
  if (r.method == OrderingMethod::Anneal) j["seed"] = r.seed;
  if (r.method == OrderingMethod::Fiedler) {
    j["lambda2"] = r.lambda2;
    j["disconnected"] = r.disconnected;
    j["degenerate"] = r.degenerate;
  }
  return j;
}

nlohmann::json checkpoint_to_json(const Checkpoint& c) {
  nlohmann::json sites = nlohmann::json::array();
  for (const auto& t : c.state.sites) {
    nlohmann::json blocks = nlohmann::json::array();
    for (int s = 0; s < kSiteDim; ++s)
      for (std::size_t i = 0; i < t.block[s].size(); ++i) {
        const auto& b = t.block[s][i];
        if (b.size() == 0) continue;
        std::vector<double> data(b.data(), b.data() + b.size());  // column major
        blocks.push_back({{"s", s}, {"sector", i}, {"rows", b.rows()}, {"cols", b.cols()}, {"data", data}});
      }
    sites.push_back({{"left", bond_json(t.left)}, {"right", bond_json(t.right)}, {"blocks", blocks}});
  }
  return {{"format", "qidmrg-checkpoint"},
          {"version", Checkpoint::kVersion},
          {"config", c.config},
          {"ordering", c.ordering.image},
          {"energy", c.energy},
          {"target", {c.state.target.n, c.state.target.sz2}},
          {"sites", sites}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "qidmrg-checkpoint") throw std::runtime_error("not a checkpoint file");
  if (j.at("version").get<int>() != Checkpoint::kVersion)
    throw std::runtime_error("unsupported checkpoint version " + j.at("version").dump());
  Checkpoint c;
  c.config = j.at("config");
  c.ordering = Permutation{j.at("ordering").get<std::vector<int>>()};
  c.energy = j.at("energy").get<double>();
  c.state.target = {j.at("target").at(0).get<int>(), j.at("target").at(1).get<int>()};
  for (const auto& js : j.at("sites")) {
    SiteTensor t;
    t.left = bond_from_json(js.at("left"));
    t.right = bond_from_json(js.at("right"));
    for (int s = 0; s < kSiteDim; ++s) t.block[s].assign(t.left.size(), Eigen::MatrixXd());
    for (const auto& jb : js.at("blocks")) {
      const int s = jb.at("s").get<int>();
      const auto i = jb.at("sector").get<std::size_t>();
      const auto rows = jb.at("rows").get<Eigen::Index>(), cols = jb.at("cols").get<Eigen::Index>();
      const auto data = jb.at("data").get<std::vector<double>>();
      if (s < 0 || s >= kSiteDim || i >= t.block[s].size() || static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw std::runtime_error("checkpoint: malformed block");
      const int r = t.right_sector(static_cast<int>(i), s);
      if (r < 0 || rows != t.left.dim[i] || cols != t.right.dim[r])
        throw std::runtime_error("checkpoint: block does not match its bond spaces");
      t.block[s][i] = Eigen::Map<const Eigen::MatrixXd>(data.data(), rows, cols);
    }
    c.state.sites.push_back(std::move(t));
  }
  if (c.ordering.size() != static_cast<int>(c.state.sites.size()) || !c.ordering.is_valid())
    throw std::runtime_error("checkpoint: ordering does not match the chain");
  return c;
}

}  // namespace qidmrg
