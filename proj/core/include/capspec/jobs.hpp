#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "capspec/fem.hpp"

namespace capspec {

// Declarative FEM run: {"domain": ..., "params": {...}, "h": ..., "k": ...,
// "tol": ..., "seed": ...}. Unknown keys are rejected. Angles in the params
// block accept raw radians or strings with a "pi" suffix ("0.8pi").
struct FemJob {
  std::string domain;  // cap | punctured_cap | helmet | sphere | sphere_hole
  double theta = 0.0;
  double t = 0.0;          // punctured_cap: hole latitude (<= 0 means t_max)
  double lambda = 2.0;     // ellipse parameter; infinity = disk
  double eps = 0.0;
  double h = 0.05;
  double h_near = 0.0;     // <= 0 means eps/6
  int k = 3;
  double tol = 1e-8;
  std::uint64_t seed = 42;
};

FemJob parse_fem_job(const std::string& json_text);

struct FemJobResult {
  FemJob job;
  SpectrumResult spectrum;
  double mesh_area = 0.0;
  int vertex_count = 0;
};

FemJobResult run_fem_job(const FemJob& job);

// CSV row: theta,eps,h,mu0,mu1,mu2,mu3,residual
extern const char* kSpectrumCsvHeader;
void write_job_csv(std::ostream& os, const FemJobResult& r);

// Parses "0.8pi" / "0.8 pi" / plain radians.
double parse_angle(const std::string& text);

} // namespace capspec
