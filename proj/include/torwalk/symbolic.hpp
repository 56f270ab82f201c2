#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include <torwalk/fourier.hpp>
#include <torwalk/hyperbolic.hpp>
#include <torwalk/intmat.hpp>

namespace torwalk {

// Eigenframe of a 2x2 hyperbolic unimodular matrix.  Columns of from_frame
// are the unit eigenvectors (unstable first), to_frame is its inverse, so
// to_frame maps a plane vector to (u, s) coordinates and the adapted norm is
// exactly max(|u|, |s|).
struct Frame {
  Eigen::Matrix2d to_frame = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d from_frame = Eigen::Matrix2d::Identity();
  Eigen::Vector2d e_u = Eigen::Vector2d::Zero();
  Eigen::Vector2d e_s = Eigen::Vector2d::Zero();
  double lambda_u = 0.0;  // signed eigenvalues, |lambda_u| > 1 > |lambda_s|
  double lambda_s = 0.0;
};

// Axis-aligned box [u0, u0+wu] x [s0, s0+ws] in frame coordinates.
struct FrameBox {
  double u0 = 0.0, s0 = 0.0, wu = 0.0, ws = 0.0;
};

struct Rectangle {
  int id = -1;
  Eigen::Vector2d anchor = Eigen::Vector2d::Zero();  // torus point in [0,1)^2
  Eigen::Vector2d unstable_edge = Eigen::Vector2d::Zero();
  Eigen::Vector2d stable_edge = Eigen::Vector2d::Zero();
};

struct MarkovPartition {
  IntMat map = IntMat(2, 2);  // the automorphism the partition was built for
  Frame frame;
  std::vector<FrameBox> boxes;        // frame-coordinate geometry
  std::vector<Rectangle> rectangles;  // plane-coordinate view of the same boxes
  std::vector<std::vector<int>> adjacency;  // 1 iff A(int R_i) meets int R_j
  double diameter = 0.0;  // adapted metric
  double delta0 = 0.0;    // expansiveness constant of the map
  double seg_a = 0.0;     // stable cut is [-seg_a, seg_a] along e_s
  double seg_c = 0.0;     // unstable cut is [-seg_c, seg_c] along e_u
};

// Builds a partition from a symmetric segment complex through 0 and extends
// the cuts by A^{+-1}-images until the diameter drops to the target.
MarkovPartition build_partition_2d(const IntMat& A, double target_diameter);

// Search variant used by the bound pipeline: scans segment complexes and
// extension depths, maximising the margin between W and the rectangles that
// miss W, subject to diameter < diameter_cap.
MarkovPartition build_partition_tuned(const IntMat& A, const BadSetW& W, double diameter_cap);

struct MarkovReport {
  bool ok = false;
  double area_sum = 0.0;
  double max_overlap = 0.0;      // worst pairwise interior overlap area
  double worst_violation = 0.0;  // worst fiber-inclusion overhang
  long long samples_checked = 0;
  long long boundary_skips = 0;
};

MarkovReport verify_markov(const MarkovPartition& partition, const IntMat& A,
                           long long samples_per_rectangle, std::uint64_t seed = 7);

// Same checks for user-supplied parallelogram rectangles (d = 2 only).
MarkovReport verify_markov_rectangles(const std::vector<Rectangle>& rects, const IntMat& A,
                                      long long samples_per_rectangle, std::uint64_t seed = 7);

struct SymbolicWindow {
  std::vector<std::vector<int>> words;  // admissible letter sequences
  long long offset = 0;                 // word position j codes A^(j-offset) x
  bool ambiguous = false;               // boundary tie produced several words
};

SymbolicWindow code_point(const Eigen::Vector2d& x, const MarkovPartition& partition,
                          const IntMat& A, long long window);

struct DecodeResult {
  Eigen::Vector2d point = Eigen::Vector2d::Zero();  // estimate of the centre iterate
  double radius = 0.0;                              // adapted-metric certificate
};

// word[j] constrains A^(j - len/2) x; returns the centre point of the window.
DecodeResult decode_word(const std::vector<int>& word, const MarkovPartition& partition,
                         const IntMat& A);

struct ClassifyReport {
  std::vector<int> r0;         // ids of rectangles meeting W
  std::vector<int> successor;  // unique r0-successor per r0 entry, -1 if not unique
  long long m0 = 0;
  long long m1 = 0;
  double eta = 0.0;     // min adapted distance from W to a rectangle missing W
  double delta0 = 0.0;  // diameter gate used for the check
  bool successor_unique = false;
};

ClassifyReport classify_rectangles(const MarkovPartition& partition, const BadSetW& W);

// Letter candidates of the exact lattice orbit rho, A rho, ... (mod n), as
// points rho/n on the torus.  Set-valued at boundary hits.
std::vector<std::vector<int>> code_lattice_orbit(const std::vector<Int>& rho, const Int& n,
                                                 const MarkovPartition& partition,
                                                 long long steps);

struct BlockReport {
  long long k = 0;
  long long m0 = 0;
  long long m1 = 0;
  std::vector<std::vector<std::vector<int>>> blocks;  // r blocks of k letter sets
  std::vector<long long> g_counts;  // per block: indices with a letter option off W
};

BlockReport block_statistics(const std::vector<Int>& rho, const Int& n,
                             const MarkovPartition& partition, const IntMat& A,
                             const ClassifyReport& cls, const HyperbolicConstants& constants,
                             long long r);

struct BlockLemmaReport {
  long long k = 0;
  bool blocks_have_escape = false;       // every checked block has an off-W option
  bool first_blocks_distinct = false;    // distinct characters get distinct first blocks
  bool block_multisets_stationary = false;  // block multiset independent of position
  long long characters_checked = 0;
  long long failures = 0;
};

// Exhaustive check over all nonzero characters mod n (d = 2).
BlockLemmaReport verify_block_lemma(const MarkovPartition& partition, const ClassifyReport& cls,
                                    const HyperbolicConstants& constants, long long n,
                                    long long blocks_to_check = 3);

double perron_root(const std::vector<std::vector<int>>& adjacency);

}  // namespace torwalk
