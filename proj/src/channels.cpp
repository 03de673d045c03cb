#include "ambitalk/channels.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace ambitalk::channels {

namespace {

constexpr std::size_t kMaxWords = 4096;

Eigen::VectorXd uniform(std::size_t n) {
  return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
}

NoisyTalkChannel constant_channel(const WordSpace &space, double p) {
  return NoisyTalkChannel(space,
                          Eigen::VectorXd::Constant(static_cast<Eigen::Index>(space.size()), p),
                          uniform(space.size()));
}

} // namespace

WordSpace::WordSpace(int alphabet_size, int length)
    : alphabet_size_(alphabet_size), length_(length), size_(1) {
  if (alphabet_size < 2) throw InvalidSpec("alphabet needs at least two letters");
  if (length < 1) throw InvalidSpec("word length must be at least 1");
  for (int i = 0; i < length; ++i) {
    size_ *= static_cast<std::size_t>(alphabet_size);
    if (size_ > kMaxWords) throw InvalidSpec("word space exceeds 4096 words");
  }
}

Word WordSpace::word(std::size_t index) const {
  if (index >= size_) throw InvalidSpec("word index out of range");
  Word w(static_cast<std::size_t>(length_));
  for (int i = length_ - 1; i >= 0; --i) {
    w[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::size_t>(alphabet_size_));
    index /= static_cast<std::size_t>(alphabet_size_);
  }
  return w;
}

std::size_t WordSpace::index(const Word &word) const {
  if (word.size() != static_cast<std::size_t>(length_))
    throw LengthMismatch("word length differs from the space");
  std::size_t idx = 0;
  for (int letter : word) {
    if (letter < 0 || letter >= alphabet_size_) throw InvalidSpec("letter out of range");
    idx = idx * static_cast<std::size_t>(alphabet_size_) + static_cast<std::size_t>(letter);
  }
  return idx;
}

std::string WordSpace::label(std::size_t index) const {
  std::ostringstream os;
  const Word w = word(index);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (alphabet_size_ > 10 && i > 0) os << '.';
    os << w[i];
  }
  return os.str();
}

std::size_t hamming(const Word &v, const Word &w) {
  if (v.size() != w.size()) throw LengthMismatch("hamming distance needs equal lengths");
  std::size_t d = 0;
  for (std::size_t i = 0; i < v.size(); ++i) d += v[i] != w[i];
  return d;
}

ShannonChannel::ShannonChannel(WordSpace space_, double q_) : space(space_), q(q_) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidSpec("q must lie in [0, 1]");
}

NoisyTalkChannel::NoisyTalkChannel(WordSpace space_, Eigen::VectorXd p_, Eigen::VectorXd g_)
    : space(space_), p(std::move(p_)), g(std::move(g_)) {
  const auto n = static_cast<Eigen::Index>(space.size());
  if (p.size() != n || g.size() != n)
    throw SpaceMismatch("noisy-talk parameters must have one entry per word");
  if ((p.array() < 0.0).any() || (p.array() > 1.0).any())
    throw InvalidSpec("error probabilities must lie in [0, 1]");
  if ((g.array() < 0.0).any() || std::abs(g.sum() - 1.0) > 1e-12)
    throw InvalidSpec("error distribution must be a probability vector");
}

double shannon_prob(const ShannonChannel &ch, const Word &v, const Word &w) {
  const auto d = static_cast<int>(hamming(v, w));
  const int n = ch.space.length();
  return std::pow(1.0 - ch.q, n - d) * std::pow(ch.q / ch.space.m(), d);
}

double noisy_talk_prob(const NoisyTalkChannel &ch, const Word &v, const Word &w) {
  const auto vi = static_cast<Eigen::Index>(ch.space.index(v));
  const auto wi = static_cast<Eigen::Index>(ch.space.index(w));
  return (1.0 - ch.p(vi)) * (vi == wi ? 1.0 : 0.0) + ch.p(vi) * ch.g(wi);
}

Eigen::MatrixXd transition_matrix(const ShannonChannel &ch) {
  const std::size_t n = ch.space.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<Word> words;
  for (std::size_t i = 0; i < n; ++i) words.push_back(ch.space.word(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = shannon_prob(ch, words[i], words[j]);
  return m;
}

Eigen::MatrixXd transition_matrix(const NoisyTalkChannel &ch) {
  const auto n = static_cast<Eigen::Index>(ch.space.size());
  Eigen::MatrixXd m = (Eigen::VectorXd::Ones(n) - ch.p).asDiagonal();
  m += ch.p * ch.g.transpose();
  return m;
}

NoisyTalkChannel BinaryFamily::member(double g_a) const {
  if (!(g_a >= g_a_min && g_a <= g_a_max))
    throw InvalidSpec("G(a) outside the admissible range of the family");
  const double g_b = 1.0 - g_a;
  Eigen::VectorXd p(2);
  p << q / g_b, q / g_a;
  Eigen::VectorXd g(2);
  g << g_a, g_b;
  return NoisyTalkChannel(WordSpace(2, 1), p.cwiseMin(1.0), g);
}

RepresentabilityResult decompose_shannon(const ShannonChannel &ch) {
  const int m = ch.space.m();
  const int n = ch.space.length();
  const double uninformative = static_cast<double>(m) / (m + 1);

  if (ch.q <= 0.0) {
    RepresentabilityResult id;
    id.representable = true;
    id.unique = false;  // any G works when nothing is confounded
    id.witness = constant_channel(ch.space, 0.0);
    throw DegenerateQ("q = 0: noiseless channel, identified with p = 0", id);
  }
  if (std::abs(ch.q - uninformative) <= 1e-15) {
    RepresentabilityResult id;
    id.representable = true;
    id.unique = true;
    id.witness = constant_channel(ch.space, 1.0);
    throw DegenerateQ("q = m/(m+1): uninformative channel, identified with p = 1 and uniform G", id);
  }
  if (ch.q > uninformative)
    throw DegenerateQ("q exceeds m/(m+1); no noisy-talk identification exists", std::nullopt);

  RepresentabilityResult r;
  if (n == 1) {
    r.representable = true;
    if (m >= 2) {
      r.unique = true;
      r.witness = constant_channel(ch.space, ch.q * (m + 1) / m);
    } else {
      r.unique = false;
      r.family = BinaryFamily{ch.q, ch.q, 1.0 - ch.q};
      r.witness = r.family->member(0.5);
    }
    return r;
  }

  // Lexicographically first triple with d(v,w) = 1 and d(v,w') = 2.
  const std::size_t size = ch.space.size();
  for (std::size_t vi = 0; vi < size; ++vi) {
    const Word v = ch.space.word(vi);
    for (std::size_t wi = 0; wi < size; ++wi) {
      const Word w = ch.space.word(wi);
      if (hamming(v, w) != 1) continue;
      for (std::size_t xi = 0; xi < size; ++xi) {
        const Word x = ch.space.word(xi);
        if (hamming(v, x) != 2) continue;
        r.representable = false;
        r.counterexample = CounterexampleTriple{v, w, x, shannon_prob(ch, v, w), shannon_prob(ch, v, x)};
        return r;
      }
    }
  }
  return r;
}

bool channels_equal(const WordSpace &sa, const Eigen::MatrixXd &a, const WordSpace &sb,
                    const Eigen::MatrixXd &b, double tol) {
  if (!(sa == sb) || a.rows() != b.rows() || a.cols() != b.cols())
    throw SpaceMismatch("channels live on different word spaces");
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

bool channels_equal(const ShannonChannel &a, const NoisyTalkChannel &b, double tol) {
  return channels_equal(a.space, transition_matrix(a), b.space, transition_matrix(b), tol);
}

bool channels_equal(const ShannonChannel &a, const ShannonChannel &b, double tol) {
  return channels_equal(a.space, transition_matrix(a), b.space, transition_matrix(b), tol);
}

bool channels_equal(const NoisyTalkChannel &a, const NoisyTalkChannel &b, double tol) {
  return channels_equal(a.space, transition_matrix(a), b.space, transition_matrix(b), tol);
}

void write_matrix_csv(std::ostream &os, const WordSpace &space, const Eigen::MatrixXd &m) {
  os << "sent,received,probability\n";
  const auto prec = os.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << space.label(static_cast<std::size_t>(i)) << ','
         << space.label(static_cast<std::size_t>(j)) << ',' << m(i, j) << '\n';
  os.precision(prec);
}

} // namespace ambitalk::channels
