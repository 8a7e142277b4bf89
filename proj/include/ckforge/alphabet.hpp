#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace ckforge {

enum class GeneratorKind : std::uint8_t { Tau, Sigma };

// Letters are stored as a 16-bit code whose numeric order is the generator
// order: tau_i -> i, sigma_k -> 0x8000 + k.
class Generator {
 public:
  static constexpr char16_t kSigmaBase = 0x8000;

  static Generator tau(int prime_index);
  static Generator sigma(int degree);
  static Generator from_code(char16_t code) { return Generator(code); }
  static Generator parse(std::string_view text);

  GeneratorKind kind() const { return code_ >= kSigmaBase ? GeneratorKind::Sigma : GeneratorKind::Tau; }
  bool is_tau() const { return kind() == GeneratorKind::Tau; }
  // prime index for tau, degree for sigma
  int index() const { return is_tau() ? code_ : code_ - kSigmaBase; }
  int degree() const { return is_tau() ? 1 : code_ - kSigmaBase; }
  char16_t code() const { return code_; }
  std::string name() const;

  auto operator<=>(const Generator&) const = default;

 private:
  explicit Generator(char16_t code) : code_(code) {}
  char16_t code_;
};

// tau_1..tau_s, then sigma_3, sigma_5, ... up to degree d
std::vector<Generator> generators(int s, int d);

class Word {
 public:
  Word() = default;
  explicit Word(std::u16string letters) : letters_(std::move(letters)) {}
  Word(std::initializer_list<Generator> letters);
  explicit Word(const std::vector<Generator>& letters);

  static Word parse(std::string_view text);

  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  int degree() const;
  int max_letter_degree() const;
  Generator operator[](std::size_t i) const { return Generator::from_code(letters_[i]); }
  const std::u16string& code() const { return letters_; }

  Word operator+(const Word& other) const { return Word(letters_ + other.letters_); }
  Word substr(std::size_t pos, std::size_t len = std::u16string::npos) const {
    return Word(letters_.substr(pos, len));
  }

  std::string to_string() const;

  auto operator<=>(const Word& other) const { return letters_ <=> other.letters_; }
  bool operator==(const Word& other) const = default;

 private:
  std::u16string letters_;
};

struct WordHash {
  std::size_t operator()(const Word& w) const { return std::hash<std::u16string>{}(w.code()); }
};

std::vector<Word> enumerate_words(int s, int d, int v);

bool is_lyndon(const Word& w);
std::vector<Word> lyndon_words(int s, int d, int v_max);

// Duval; empty word gives an empty factorization
std::vector<Word> cfl_factorize(const Word& w);

}  // namespace ckforge
