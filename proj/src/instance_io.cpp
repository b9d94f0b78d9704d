#include "ssn/instance_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ssn {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "ssn-instance";
constexpr int kVersion = 1;

json vec(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector to_vector(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw IoError("instance file: " + msg);
}

}  // namespace

std::string instance_to_json(const ProblemInstance& inst) {
  const InstanceSpec& s = inst.spec;
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["kind"] = to_string(s.kind);
  j["operator"] = to_string(s.op);
  j["n"] = s.n;
  j["m"] = s.m;
  j["k"] = s.k;
  j["d_db"] = s.d_db;
  j["mu_requested"] = s.mu;
  j["mu_scale"] = s.mu_scale;
  j["mu"] = inst.mu;
  j["sigma"] = s.sigma;
  j["seed"] = s.seed;
  j["rows"] = inst.rows;
  j["support"] = inst.support;
  j["signs"] = inst.signs;
  j["eta2"] = inst.eta2;
  j["noise"] = vec(inst.noise);
  j["b"] = vec(inst.b);
  j["xbar"] = vec(inst.xbar);
  if (s.op == OperatorKind::dense) {
    // row-major
    std::vector<double> e;
    e.reserve(static_cast<std::size_t>(inst.dense.size()));
    for (Index r = 0; r < inst.dense.rows(); ++r)
      for (Index c = 0; c < inst.dense.cols(); ++c) e.push_back(inst.dense(r, c));
    j["dense"] = e;
  }
  return j.dump();
}

ProblemInstance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("instance file: ") + e.what());
  }
  check(j.is_object() && j.value("format", "") == kFormat, "not an ssn instance");
  check(j.value("version", 0) == kVersion, "unsupported version");

  ProblemInstance inst;
  try {
    InstanceSpec& s = inst.spec;
    s.kind = parse_problem_kind(j.at("kind").get<std::string>());
    s.op = parse_operator_kind(j.at("operator").get<std::string>());
    s.n = j.at("n").get<Index>();
    s.m = j.at("m").get<Index>();
    s.k = j.at("k").get<Index>();
    s.d_db = j.at("d_db").get<double>();
    s.mu = j.at("mu_requested").get<double>();
    s.mu_scale = j.at("mu_scale").get<double>();
    s.sigma = j.at("sigma").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.validate();
    inst.mu = j.at("mu").get<double>();
    inst.rows = j.at("rows").get<std::vector<Index>>();
    inst.support = j.at("support").get<std::vector<Index>>();
    inst.signs = j.at("signs").get<std::vector<int>>();
    inst.eta2 = j.at("eta2").get<std::vector<double>>();
    inst.noise = to_vector(j.at("noise"));
    inst.b = to_vector(j.at("b"));
    inst.xbar = to_vector(j.at("xbar"));
    check(inst.b.size() == s.m && inst.xbar.size() == s.n, "b/xbar sizes disagree with m/n");
    check(inst.support.size() == static_cast<std::size_t>(s.k) && inst.signs.size() == inst.support.size() &&
              inst.eta2.size() == inst.support.size(),
          "support/signs/eta2 sizes disagree with k");
    if (s.op == OperatorKind::dense) {
      const auto e = j.at("dense").get<std::vector<double>>();
      check(e.size() == static_cast<std::size_t>(s.m * s.n), "dense entries have wrong size");
      inst.dense.resize(s.m, s.n);
      for (Index r = 0; r < s.m; ++r)
        for (Index c = 0; c < s.n; ++c) inst.dense(r, c) = e[static_cast<std::size_t>(r * s.n + c)];
    } else {
      check(inst.rows.size() == static_cast<std::size_t>(s.m), "rows has wrong size");
    }
    inst.build_operator();
  } catch (const json::exception& e) {
    throw IoError(std::string("instance file: ") + e.what());
  } catch (const ContractError& e) {
    throw IoError(std::string("instance file: ") + e.what());
  }
  return inst;
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << instance_to_json(inst) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

}  // namespace ssn
