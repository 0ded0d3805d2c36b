#include "capspec/jobs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include <json.hpp>

#include "capspec/cap_eigen.hpp"

namespace capspec {

double parse_angle(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' '; }), s.end());
  double factor = 1.0;
  if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
    factor = kPi;
    s = s.substr(0, s.size() - 2);
    if (s.empty()) s = "1";
  }
  size_t used = 0;
  double v;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("parse_angle: cannot parse '" + text + "'");
  }
  if (used != s.size()) throw DomainError("parse_angle: trailing junk in '" + text + "'");
  return v * factor;
}

namespace {

double angle_field(const nlohmann::json& j) {
  if (j.is_string()) return parse_angle(j.get<std::string>());
  return j.get<double>();
}

void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw DomainError("fem job: unknown key '" + it.key() + "' in " + where);
}

} // namespace

FemJob parse_fem_job(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    throw DomainError(std::string("fem job: invalid JSON: ") + e.what());
  }
  reject_unknown(j, {"domain", "params", "h", "k", "tol", "seed"}, "the job");

  FemJob job;
  job.domain = j.at("domain").get<std::string>();
  if (j.contains("h")) job.h = j["h"].get<double>();
  if (j.contains("k")) job.k = j["k"].get<int>();
  if (j.contains("tol")) job.tol = j["tol"].get<double>();
  if (j.contains("seed")) job.seed = j["seed"].get<std::uint64_t>();

  const nlohmann::json params = j.value("params", nlohmann::json::object());
  reject_unknown(params, {"theta", "t", "lambda", "eps", "h_near"}, "params");
  if (params.contains("theta")) job.theta = angle_field(params["theta"]);
  if (params.contains("t")) job.t = angle_field(params["t"]);
  if (params.contains("lambda")) {
    if (params["lambda"].is_string() && params["lambda"] == "disk")
      job.lambda = std::numeric_limits<double>::infinity();
    else
      job.lambda = params["lambda"].get<double>();
  }
  if (params.contains("eps")) job.eps = params["eps"].get<double>();
  if (params.contains("h_near")) job.h_near = params["h_near"].get<double>();

  const std::set<std::string> domains = {"cap", "punctured_cap", "helmet", "sphere",
                                         "sphere_hole"};
  if (!domains.count(job.domain))
    throw DomainError("fem job: unknown domain '" + job.domain + "'");
  return job;
}

FemJobResult run_fem_job(const FemJob& job) {
  SurfaceMesh mesh;
  if (job.domain == "cap") {
    mesh = mesh_cap(job.theta, job.h);
  } else if (job.domain == "sphere") {
    mesh = mesh_cap(kPi, job.h);
  } else if (job.domain == "punctured_cap") {
    double t = job.t;
    if (!(t > 0.0)) t = find_tmax(job.theta);
    const double h_near = job.h_near > 0.0 ? job.h_near : job.eps / 6.0;
    mesh = mesh_punctured_cap(job.theta, t, job.lambda, job.eps, job.h, h_near);
  } else if (job.domain == "sphere_hole") {
    const double h_near = job.h_near > 0.0 ? job.h_near : job.eps / 6.0;
    mesh = mesh_sphere_with_hole(job.eps, job.lambda, job.h, h_near);
  } else if (job.domain == "helmet") {
    mesh = mesh_helmet(job.theta, job.eps, job.h);
  }

  FemJobResult r;
  r.job = job;
  r.spectrum = cap_spectrum(mesh, std::max(3, job.k), job.tol, job.seed);
  r.mesh_area = mesh.area();
  r.vertex_count = static_cast<int>(mesh.vertices.size());
  return r;
}

const char* kSpectrumCsvHeader = "theta,eps,h,mu0,mu1,mu2,mu3,residual";

void write_job_csv(std::ostream& os, const FemJobResult& r) {
  double worst = 0.0;
  for (double x : r.spectrum.residuals) worst = std::max(worst, x);
  os << fmt_sig(r.job.theta) << "," << fmt_sig(r.job.eps) << "," << fmt_sig(r.job.h);
  for (int i = 0; i < 4; ++i)
    os << ","
       << (i < static_cast<int>(r.spectrum.eigenvalues.size())
               ? fmt_sig(r.spectrum.eigenvalues[i])
               : "");
  os << "," << fmt_sig(worst) << "\n";
}

} // namespace capspec
