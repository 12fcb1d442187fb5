#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nashlab/profile.hpp"

namespace nashlab {

// Binary linear [m2, n2] code C' with rate 1/4. Vertex halves use only the
// low `real_bits` message bits; the rest are padding frozen to zero.
// Codeword position c is bit (m2-1-c) of a row.
struct LinearCode {
  int n2 = 0;
  int m2 = 0;
  int real_bits = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> rows;
  int distance = 0;            // min weight over all nonzero messages
  int effective_distance = 0;  // min weight over nonzero real messages

  std::uint64_t encode_half(std::uint64_t message) const;
  bool bit(std::uint64_t codeword, int position) const {
    return (codeword >> (m2 - 1 - position)) & 1;
  }
  double relative_distance() const { return double(distance) / m2; }

  // Rejection-samples generator matrices until the relative distance is at
  // least min_relative and the real-message subcode reaches min_effective.
  static LinearCode generate(int n2, int real_bits, std::uint64_t seed, double min_relative = 0.1,
                             int min_effective = 0);
};

// Brute-force min weight over nonzero messages of the first `message_bits` rows.
int certify_min_weight(const std::vector<std::uint64_t>& rows, int message_bits);

// Smallest m = s^2 with s a multiple of lcm(ell, 4) and m >= 4n.
int padded_block_length(int n, int ell);

// Concatenated vertex code C: label (v^a o v^b) -> Enc'(v^a) o Enc'(v^b), with
// v^a the high `na` label bits.
struct VertexCode {
  LinearCode half;
  int na = 0;
  int nb = 0;

  int n() const { return na + nb; }
  int m() const { return 2 * half.m2; }
  std::uint64_t half_a(std::uint64_t label) const { return label >> nb; }
  std::uint64_t half_b(std::uint64_t label) const { return label & ((std::uint64_t{1} << nb) - 1); }
  std::vector<std::uint8_t> encode_full(std::uint64_t label) const;
  // Block-normalized distance separating codewords of distinct vertices.
  double min_separation() const;

  static VertexCode build(int n, int ell, std::uint64_t seed, const ConstantsProfile& profile,
                          int na = -1);
};

// Smallest effective half distance that keeps the decoding bands apart.
int required_effective_distance(int m, const ConstantsProfile& profile);

enum class DecodeStatus { kDecoded, kAmbiguous, kBottom };

struct DecodeResult {
  DecodeStatus status = DecodeStatus::kBottom;
  std::uint64_t message = 0;  // nearest message (label for full decodes)
  double distance = 0;        // normalized 2-norm to that codeword
};

// y has length m2 (one half, decoded over `message_bits` real bits) or m
// (full vertex decode). Ties go to the smallest message.
DecodeResult nearest_half(const LinearCode& code, std::span<const double> y, int message_bits,
                          double inner, double outer);
DecodeResult nearest_codeword(const VertexCode& code, std::span<const double> y, double inner,
                              double outer);

std::string write_code(const LinearCode& code);
LinearCode read_code(const std::string& text);

}  // namespace nashlab
