#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ambitalk/errors.hpp"

namespace ambitalk::channels {

using Word = std::vector<int>;

/// All words of length n over an alphabet of m+1 letters, in lexicographic order.
class WordSpace {
public:
  WordSpace(int alphabet_size, int length);

  int alphabet_size() const { return alphabet_size_; }
  int m() const { return alphabet_size_ - 1; }
  int length() const { return length_; }
  std::size_t size() const { return size_; }

  Word word(std::size_t index) const;
  std::size_t index(const Word &word) const;
  std::string label(std::size_t index) const;

  bool operator==(const WordSpace &other) const = default;

private:
  int alphabet_size_;
  int length_;
  std::size_t size_;
};

/// Number of positions in which two words differ.
std::size_t hamming(const Word &v, const Word &w);

/// q-ary symmetric channel: (1-q)^(n-d) (q/m)^d.
struct ShannonChannel {
  WordSpace space;
  double q;

  ShannonChannel(WordSpace space, double q);
};

/// Word-dependent error probability p_v with a common error distribution G.
struct NoisyTalkChannel {
  WordSpace space;
  Eigen::VectorXd p;
  Eigen::VectorXd g;

  NoisyTalkChannel(WordSpace space, Eigen::VectorXd p, Eigen::VectorXd g);
};

double shannon_prob(const ShannonChannel &ch, const Word &v, const Word &w);
double noisy_talk_prob(const NoisyTalkChannel &ch, const Word &v, const Word &w);

/// Row v holds the distribution of the received word given v was sent.
Eigen::MatrixXd transition_matrix(const ShannonChannel &ch);
Eigen::MatrixXd transition_matrix(const NoisyTalkChannel &ch);

/// Binary single-letter channels admit a one-parameter family of
/// representations: G(a) in [g_a_min, g_a_max], G(b) = 1 - G(a),
/// p_a = q / G(b), p_b = q / G(a).
struct BinaryFamily {
  double q;
  double g_a_min;
  double g_a_max;

  NoisyTalkChannel member(double g_a) const;
};

/// Words v, w, w' with d(v, w) = 1 and d(v, w') = 2. A noisy-talk channel
/// constant on Hamming spheres assigns both received words the same
/// probability, while the Shannon entries differ.
struct CounterexampleTriple {
  Word v;
  Word w;
  Word w_prime;
  double shannon_w;
  double shannon_w_prime;
};

struct RepresentabilityResult {
  bool representable = false;
  bool unique = false;
  std::optional<NoisyTalkChannel> witness;
  std::optional<BinaryFamily> family;
  std::optional<CounterexampleTriple> counterexample;
};

/// q outside the open range (0, m/(m+1)). Carries the known identification
/// for q = 0 and q = m/(m+1).
class DegenerateQ : public Error {
public:
  DegenerateQ(const std::string &what, std::optional<RepresentabilityResult> identification)
      : Error(what), identification_(std::move(identification)) {}

  const std::optional<RepresentabilityResult> &identification() const {
    return identification_;
  }

private:
  std::optional<RepresentabilityResult> identification_;
};

/// Decides whether a Shannon channel is of noisy-talk type and returns a
/// witness or a counterexample.
RepresentabilityResult decompose_shannon(const ShannonChannel &ch);

bool channels_equal(const WordSpace &sa, const Eigen::MatrixXd &a,
                    const WordSpace &sb, const Eigen::MatrixXd &b, double tol);
bool channels_equal(const ShannonChannel &a, const NoisyTalkChannel &b, double tol);
bool channels_equal(const ShannonChannel &a, const ShannonChannel &b, double tol);
bool channels_equal(const NoisyTalkChannel &a, const NoisyTalkChannel &b, double tol);

/// Long-format CSV: sent,received,probability.
void write_matrix_csv(std::ostream &os, const WordSpace &space, const Eigen::MatrixXd &m);

} // namespace ambitalk::channels
