#include "ckforge/alphabet.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace ckforge {

Generator Generator::tau(int prime_index) {
  if (prime_index < 1 || prime_index >= kSigmaBase) throw std::invalid_argument("tau index out of range");
  return Generator(static_cast<char16_t>(prime_index));
}

Generator Generator::sigma(int degree) {
  if (degree < 3 || degree % 2 == 0 || degree >= 0x7fff) throw std::invalid_argument("sigma degree must be odd and >= 3");
  return Generator(static_cast<char16_t>(kSigmaBase + degree));
}

Generator Generator::parse(std::string_view text) {
  if (text.size() < 2 || (text[0] != 't' && text[0] != 's')) {
    throw std::invalid_argument("bad generator: " + std::string(text));
  }
  int n = 0;
  auto [ptr, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), n);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad generator: " + std::string(text));
  }
  return text[0] == 't' ? tau(n) : sigma(n);
}

std::string Generator::name() const {
  return (is_tau() ? "t" : "s") + std::to_string(index());
}

std::vector<Generator> generators(int s, int d) {
  std::vector<Generator> out;
  if (d >= 1) {
    for (int i = 1; i <= s; ++i) out.push_back(Generator::tau(i));
  }
  for (int k = 3; k <= d; k += 2) out.push_back(Generator::sigma(k));
  return out;
}

Word::Word(std::initializer_list<Generator> letters) {
  for (auto g : letters) letters_.push_back(g.code());
}

Word::Word(const std::vector<Generator>& letters) {
  for (auto g : letters) letters_.push_back(g.code());
}

Word Word::parse(std::string_view text) {
  if (text == "1") return Word();
  Word w;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto dot = text.find('.', start);
    auto piece = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    w.letters_.push_back(Generator::parse(piece).code());
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return w;
}

int Word::degree() const {
  int d = 0;
  for (char16_t c : letters_) d += Generator::from_code(c).degree();
  return d;
}

int Word::max_letter_degree() const {
  int d = 0;
  for (char16_t c : letters_) d = std::max(d, Generator::from_code(c).degree());
  return d;
}

std::string Word::to_string() const {
  if (letters_.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) out += '.';
    out += Generator::from_code(letters_[i]).name();
  }
  return out;
}

namespace {

void extend_words(const std::vector<Generator>& alphabet, int remaining, std::u16string& prefix,
                  std::vector<Word>& out) {
  if (remaining == 0) {
    out.emplace_back(prefix);
    return;
  }
  for (auto g : alphabet) {
    if (g.degree() > remaining) continue;
    prefix.push_back(g.code());
    extend_words(alphabet, remaining - g.degree(), prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Word> enumerate_words(int s, int d, int v) {
  std::vector<Word> out;
  if (v < 0) return out;
  auto alphabet = generators(s, d);
  std::u16string prefix;
  extend_words(alphabet, v, prefix, out);
  return out;
}

bool is_lyndon(const Word& w) {
  if (w.empty()) throw std::invalid_argument("Lyndon words are non-empty");
  const auto& c = w.code();
  const std::size_t n = c.size();
  // Duval's test: a single factor covering the whole word
  std::size_t i = 0, j = 1;
  while (j < n && c[i] <= c[j]) {
    i = (c[i] < c[j]) ? 0 : i + 1;
    ++j;
  }
  return j == n && i == 0;
}

std::vector<Word> lyndon_words(int s, int d, int v_max) {
  std::vector<Word> out;
  for (int v = 1; v <= v_max; ++v) {
    for (auto& w : enumerate_words(s, d, v)) {
      if (is_lyndon(w)) out.push_back(std::move(w));
    }
  }
  return out;
}

std::vector<Word> cfl_factorize(const Word& w) {
  std::vector<Word> out;
  const auto& c = w.code();
  const std::size_t n = c.size();
  std::size_t k = 0;
  while (k < n) {
    std::size_t i = k, j = k + 1;
    while (j < n && c[i] <= c[j]) {
      i = (c[i] < c[j]) ? k : i + 1;
      ++j;
    }
    while (k <= i) {
      out.push_back(w.substr(k, j - i));
      k += j - i;
    }
  }
  return out;
}

}  // namespace ckforge
