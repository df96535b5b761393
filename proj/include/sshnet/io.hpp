#ifndef SSHNET_IO_HPP_
#define SSHNET_IO_HPP_

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "sshnet/errors.hpp"
#include "sshnet/gibbs.hpp"
#include "sshnet/netsim.hpp"

namespace sshnet {

using json = nlohmann::ordered_json;

constexpr int kDatasetVersion = 1;

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Writes to a sibling temporary file and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", origin + ": malformed JSON (" + e.what() + ")");
  }
}

// Shortest decimal text that parses back to the same double.
inline std::string num(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// Columns of `M` as a JSON array of arrays.
inline json columns_to_json(const Eigen::MatrixXd& M) {
  json a = json::array();
  for (Eigen::Index k = 0; k < M.cols(); ++k) a.push_back(vector_to_json(M.col(k)));
  return a;
}

namespace detail {

inline const json& require(const json& j, const std::string& key, const std::string& ptr) {
  if (!j.is_object()) throw ParseError(ptr, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(ptr + "/" + key, "missing required field");
  return *it;
}

inline double as_double(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw ParseError(ptr, "expected a number");
  return j.get<double>();
}

inline std::int64_t as_int(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw ParseError(ptr, "expected an integer");
  return j.get<std::int64_t>();
}

inline Eigen::VectorXd as_vector(const json& j, const std::string& ptr,
                                 std::optional<Eigen::Index> expected_len) {
  if (!j.is_array()) throw ParseError(ptr, "expected an array of numbers");
  if (expected_len && static_cast<Eigen::Index>(j.size()) != *expected_len) {
    std::ostringstream os;
    os << "expected " << *expected_len << " entries, found " << j.size();
    throw ParseError(ptr, os.str());
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = as_double(j[i], ptr + "/" + std::to_string(i));
  }
  return v;
}

}  // namespace detail

inline json dataset_to_json(const NetworkDataset& ds) {
  json j;
  j["version"] = kDatasetVersion;
  j["dims"] = {{"n", ds.n}, {"m", ds.m}, {"p", ds.p}};
  j["seed"] = ds.seed;
  j["input_kind"] = to_string(ds.input_kind);
  json inputs = json::array();
  for (const auto& u : ds.inputs) inputs.push_back(vector_to_json(u));
  j["inputs"] = std::move(inputs);
  j["outputs"] = vector_to_json(ds.outputs);
  if (ds.truth) j["truth"] = columns_to_json(*ds.truth);
  if (ds.sigma2_true) j["sigma2_true"] = *ds.sigma2_true;
  if (ds.active_set) {
    json a = json::array();
    for (int k : *ds.active_set) a.push_back(k + 1);
    j["active_set"] = std::move(a);
  }
  j["created_at"] = utc_timestamp();
  return j;
}

inline NetworkDataset dataset_from_json(const json& j) {
  using detail::require;
  NetworkDataset ds;
  const auto version = detail::as_int(require(j, "version", ""), "/version");
  if (version != kDatasetVersion) {
    throw ParseError("/version", "unsupported dataset version " + std::to_string(version));
  }
  const json& dims = require(j, "dims", "");
  ds.n = detail::as_int(require(dims, "n", "/dims"), "/dims/n");
  ds.m = detail::as_int(require(dims, "m", "/dims"), "/dims/m");
  ds.p = detail::as_int(require(dims, "p", "/dims"), "/dims/p");
  if (ds.n < 1 || ds.m < 1 || ds.p < 1) throw ParseError("/dims", "dimensions must be positive");
  const json& seed = require(j, "seed", "");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw ParseError("/seed", "expected an integer");
  }
  ds.seed = seed.get<std::uint64_t>();
  const json& kind = require(j, "input_kind", "");
  if (!kind.is_string()) throw ParseError("/input_kind", "expected a string");
  try {
    ds.input_kind = parse_input_kind(kind.get<std::string>());
  } catch (const UsageError& e) {
    throw ParseError("/input_kind", e.what());
  }

  const json& inputs = require(j, "inputs", "");
  if (!inputs.is_array() || static_cast<Eigen::Index>(inputs.size()) != ds.p) {
    throw ParseError("/inputs", "expected p = " + std::to_string(ds.p) + " input arrays");
  }
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    ds.inputs.push_back(detail::as_vector(inputs[k], "/inputs/" + std::to_string(k),
                                          ds.n + ds.m - 1));
  }
  ds.outputs = detail::as_vector(require(j, "outputs", ""), "/outputs", ds.n);

  if (auto it = j.find("truth"); it != j.end()) {
    if (!it->is_array() || static_cast<Eigen::Index>(it->size()) != ds.p) {
      throw ParseError("/truth", "expected p = " + std::to_string(ds.p) + " arrays");
    }
    Eigen::MatrixXd truth(ds.m, ds.p);
    for (std::size_t k = 0; k < it->size(); ++k) {
      truth.col(static_cast<Eigen::Index>(k)) =
          detail::as_vector((*it)[k], "/truth/" + std::to_string(k), ds.m);
    }
    ds.truth = std::move(truth);
  }
  if (auto it = j.find("sigma2_true"); it != j.end()) {
    ds.sigma2_true = detail::as_double(*it, "/sigma2_true");
  }
  if (auto it = j.find("active_set"); it != j.end()) {
    if (!it->is_array()) throw ParseError("/active_set", "expected an array");
    std::vector<int> active;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string ptr = "/active_set/" + std::to_string(i);
      const auto idx = detail::as_int((*it)[i], ptr);
      if (idx < 1 || idx > ds.p) throw ParseError(ptr, "module index out of range 1..p");
      active.push_back(static_cast<int>(idx - 1));
    }
    ds.active_set = std::move(active);
  }
  return ds;
}

inline void save_dataset(const NetworkDataset& ds, const std::filesystem::path& path) {
  write_file_atomic(path, dataset_to_json(ds).dump(1) + "\n");
}

inline NetworkDataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_json(parse_json_text(read_file(path), path.string()));
}

// One row per stored sweep: sweep, sigma2, tau2, lambda2_1..lambda2_p.
inline std::string chain_to_csv(const ChainRecord& rec) {
  std::ostringstream os;
  const std::size_t p = rec.lambda2.empty() ? 0 : static_cast<std::size_t>(rec.lambda2.front().size());
  os << "sweep,sigma2,tau2";
  for (std::size_t k = 1; k <= p; ++k) os << ",lambda2_" << k;
  os << "\n";
  for (std::size_t s = 0; s < rec.sweeps.size(); ++s) {
    os << rec.sweeps[s] << "," << num(rec.sigma2[s]) << "," << num(rec.tau2[s]);
    for (Eigen::Index k = 0; k < rec.lambda2[s].size(); ++k) os << "," << num(rec.lambda2[s](k));
    os << "\n";
  }
  return os.str();
}

// Stored theta_k draws of one module: sweep, theta_1..theta_m.
inline std::string theta_samples_to_csv(const ChainRecord& rec, Eigen::Index k) {
  std::ostringstream os;
  os << "sweep";
  const Eigen::Index m = rec.theta_mean.rows();
  for (Eigen::Index i = 1; i <= m; ++i) os << ",theta_" << i;
  os << "\n";
  for (std::size_t s = 0; s < rec.theta_samples.size(); ++s) {
    os << rec.sweeps[s];
    for (Eigen::Index i = 0; i < m; ++i) os << "," << num(rec.theta_samples[s](i, k));
    os << "\n";
  }
  return os.str();
}

}  // namespace sshnet

#endif  // SSHNET_IO_HPP_
