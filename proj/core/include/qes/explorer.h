// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the qes authors

#pragma once

#include <string>
#include <vector>

#include "qes/models.h"
#include "qes/spectral.h"

namespace qes {

/// Classification attached to each scan record. `real_layer` entries are the
/// admissible layers; the other tags keep rejected eigenvalues visible in the
/// output instead of silently dropping them.
enum class ScanClass { real_layer, complex_discarded, refinement_failed, bae_mismatch };

const char* scan_class_name(ScanClass c);

struct AxisSpec {
  std::string name;
  real lo{0};
  real hi{0};
  int steps{21};
};

struct ScanRecord {
  real axis1{0};
  real axis2{0};
  int layer{0};
  real value{0};  // solved value; real part when the eigenvalue is complex
  ScanClass cls{ScanClass::real_layer};
};

/// Layer surface over a two-parameter grid. Records are stored in grid order
/// (axis1 outer, axis2 inner); within one grid point the admissible layers
/// come first, sorted ascending, with layer indices contiguous from 0.
struct ScanSurface {
  Family family{Family::sextic};
  int n{0};
  int p{0};
  AxisSpec axis1;
  AxisSpec axis2;
  std::vector<ScanRecord> records;
};

struct ScanOptions {
  AxisSpec axis1;  // name/range empty -> family default
  AxisSpec axis2;
  int precision_digits{30};
  unsigned long long seed{0};
};

/// One spectral branch and its Bethe roots. For conjugate eigenvalue pairs
/// (kink accessory branches) the two root sets are merged into a single
/// conjugation-closed cloud labelled by the shared real part.
struct RootCloud {
  Family family{Family::sextic};
  int n{0};
  int p{0};
  real branch{0};
  std::vector<cplx> points;
  bool refinement_failed{false};
  real bae_residual{0};
};

/// Replaces a constrained parameter by its quasi-exactly solvable value where
/// one exists: the sextic alpha becomes beta^2/(4 gamma) - (3+4n+2p) sqrt(gamma).
/// Every other family is returned unchanged (their constraint fixes the
/// spectral unknown itself, not a fixed parameter).
ModelInstance on_qes_locus(const ModelInstance& m);

/// Default grid axes for the family (the ranges used in the survey plots).
AxisSpec default_axis1(Family f);
AxisSpec default_axis2(Family f);

/// Solves the pencil at every grid point and classifies the eigenvalues.
/// Grid points where the instance itself is invalid (gamma = 0 columns and
/// the like) or where nothing is admissible contribute no records.
/// The kink family has no two-parameter layer surface and is rejected.
ScanSurface scan(Family f, int n, int p, const ScanOptions& opt = {});

/// One cloud per admissible spectral branch, sorted by branch value.
/// Branches whose refinement failed are kept and flagged.
std::vector<RootCloud> root_cloud(const ModelInstance& m,
                                  const SolveOptions& opt = {});

enum class EmitFormat { csv, json };

/// 17-significant-digit serialization used by both emitters.
std::string format_sig17(const real& x);

std::string render(const ScanSurface& s, EmitFormat f);
std::string render(const std::vector<RootCloud>& clouds, EmitFormat f);

/// Writes `text` to `path`; throws on I/O failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace qes
