#pragma once

// Planar contracting similarities, words over the map alphabet and
// eventually periodic addresses.

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ifsg {

using Point = std::complex<double>;

/// z -> r e^{i theta} z + t, or r e^{i theta} conj(z) + t when reflecting.
///
/// The ratio is kept as a plain product under composition so that it can be
/// read back exactly. The rotation is accumulated without normalization and
/// only wrapped into (-pi, pi] by rotation(). Ratios >= 1 are representable
/// (inverses, relative maps, the identity); SimSystem enforces contraction.
class Similarity {
 public:
  Similarity() = default;
  Similarity(double ratio, double rotation, bool reflect, Point translation);

  static Similarity identity() { return {}; }

  double ratio() const { return ratio_; }
  double rotation() const;
  double raw_rotation() const { return angle_; }
  bool reflect() const { return reflect_; }
  Point translation() const { return t_; }
  Point linear() const { return a_; }
  bool is_contracting() const { return ratio_ < 1.0; }

  Point operator()(Point z) const { return a_ * (reflect_ ? std::conj(z) : z) + t_; }

  Similarity inverse() const;

  /// (f * g)(z) = f(g(z)).
  friend Similarity operator*(const Similarity& f, const Similarity& g);

 private:
  double ratio_ = 1.0;
  double angle_ = 0.0;
  bool reflect_ = false;
  Point t_{0.0, 0.0};
  Point a_{1.0, 0.0};
};

double normalize_angle(double theta);

/// Fixed point of a contracting similarity; DomainError when ratio >= 1.
Point fixed_point(const Similarity& s);

/// Finite word over the map alphabet. Letters are stored 0-based (map index);
/// the text form is 1-based ("123"), dot-separated when any letter exceeds 9.
class Multiindex {
 public:
  Multiindex() = default;
  explicit Multiindex(std::vector<std::uint8_t> letters) : letters_(std::move(letters)) {}

  static Multiindex parse(std::string_view text);
  static Multiindex repeat(const Multiindex& w, std::size_t times);

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  std::uint8_t operator[](std::size_t k) const { return letters_[k]; }
  std::uint8_t back() const { return letters_.back(); }
  const std::vector<std::uint8_t>& letters() const { return letters_; }

  void push_back(std::uint8_t letter) { letters_.push_back(letter); }
  void pop_back() { letters_.pop_back(); }
  Multiindex child(std::uint8_t letter) const;
  Multiindex prefix(std::size_t n) const;
  Multiindex suffix_from(std::size_t n) const;

  friend Multiindex operator+(const Multiindex& a, const Multiindex& b);
  friend auto operator<=>(const Multiindex&, const Multiindex&) = default;
  friend bool operator==(const Multiindex&, const Multiindex&) = default;

  std::string str() const;

 private:
  std::vector<std::uint8_t> letters_;
};

enum class WordRelation { Prefix, Extension, Incomparable, Equal };

/// Prefix: u is a proper prefix of v. Extension: v is a proper prefix of u.
WordRelation word_relation(const Multiindex& u, const Multiindex& v);
std::size_t common_prefix_length(const Multiindex& u, const Multiindex& v);
const char* to_string(WordRelation r);

/// The infinite word preperiod . period . period ..., always held in canonical
/// form (primitive period, shortest preperiod), so == compares addresses.
class Address {
 public:
  Address(Multiindex preperiod, Multiindex period);

  /// "1(2)" means 1 followed by 2 repeated; "(12)" is purely periodic.
  static Address parse(std::string_view text);

  const Multiindex& preperiod() const { return pre_; }
  const Multiindex& period() const { return period_; }
  bool is_periodic() const { return pre_.empty(); }

  /// k-th letter of the infinite word.
  std::uint8_t letter(std::size_t k) const;

  friend bool operator==(const Address&, const Address&) = default;
  friend auto operator<=>(const Address&, const Address&) = default;

  std::string str() const;

 private:
  Multiindex pre_;
  Multiindex period_;
};

/// An ordered list of at least two contracting similarities.
class SimSystem {
 public:
  explicit SimSystem(std::vector<Similarity> maps);

  std::size_t size() const { return maps_.size(); }
  const Similarity& operator[](std::size_t i) const { return maps_[i]; }
  const std::vector<Similarity>& maps() const { return maps_; }

  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }

  /// Throws IndexError when a letter is not a map of this system.
  void check(const Multiindex& w) const;

 private:
  std::vector<Similarity> maps_;
  double r_min_ = 0.0;
  double r_max_ = 0.0;
};

/// S_{j1} o S_{j2} o ... o S_{jn}; the empty word gives the identity.
Similarity compose(const SimSystem& system, const Multiindex& word);

Point eval_address(const SimSystem& system, const Address& a);

}  // namespace ifsg
