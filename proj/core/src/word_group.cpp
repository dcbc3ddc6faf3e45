#include "equifact/group_model.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <stdexcept>

namespace equifact {

namespace {

constexpr int kMaxRewritePasses = 10000;

char flip_case(char c) {
  return std::isupper(static_cast<unsigned char>(c))
             ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
             : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
}

bool cancel_once(std::string& w) {
  for (size_t i = 0; i + 1 < w.size(); ++i) {
    if (w[i] != w[i + 1] && flip_case(w[i]) == w[i + 1]) {
      w.erase(i, 2);
      return true;
    }
  }
  return false;
}

bool rewrite_once(std::string& w, const std::vector<Relation>& relations) {
  size_t best_pos = std::string::npos;
  size_t best_rule = 0;
  for (size_t r = 0; r < relations.size(); ++r) {
    const size_t pos = w.find(relations[r].first);
    if (pos != std::string::npos && pos < best_pos) {
      best_pos = pos;
      best_rule = r;
    }
  }
  if (best_pos == std::string::npos) {
    return false;
  }
  w.replace(best_pos, relations[best_rule].first.size(), relations[best_rule].second);
  return true;
}

std::string reduce_word(std::string w, const std::vector<Relation>& relations) {
  for (int pass = 0; pass < kMaxRewritePasses; ++pass) {
    if (cancel_once(w)) {
      continue;
    }
    if (rewrite_once(w, relations)) {
      continue;
    }
    return w;
  }
  throw std::invalid_argument("word reduction did not terminate; check the rewriting rules");
}

std::string word_id(const std::string& w) { return w.empty() ? "e" : w; }

}  // namespace

GroupSystem GroupSystem::word_ball(const std::vector<WordGenerator>& generators, int radius,
                                   const std::vector<Relation>& relations,
                                   const FiniteProbSpace& space,
                                   std::optional<Matrix> complex_structure) {
  if (generators.empty()) {
    throw std::invalid_argument("word_ball: no generators");
  }
  if (radius < 1) {
    throw std::invalid_argument("word_ball: radius must be at least 1");
  }
  const Index d = generators[0].rep.rows();
  const Index n_atoms = space.size();

  std::map<char, const WordGenerator*> by_letter;
  std::map<char, Matrix> letter_rep;
  std::map<char, Permutation> letter_action;
  for (const auto& gen : generators) {
    if (gen.name.size() != 1 || !std::isalpha(static_cast<unsigned char>(gen.name[0])) ||
        !std::islower(static_cast<unsigned char>(gen.name[0])) || gen.name[0] == 'e') {
      throw std::invalid_argument(
          "word_ball: generator names must be single lowercase letters other than 'e'");
    }
    const char c = gen.name[0];
    if (by_letter.count(c)) {
      throw std::invalid_argument("word_ball: duplicate generator '" + gen.name + "'");
    }
    if (gen.rep.rows() != d || gen.rep.cols() != d) {
      throw std::invalid_argument("word_ball: generator reps must share one dimension");
    }
    if (!is_permutation(gen.action, n_atoms)) {
      throw std::invalid_argument("word_ball: action of '" + gen.name +
                                  "' is not a permutation of the atoms");
    }
    Eigen::FullPivLU<Matrix> lu(gen.rep);
    if (!lu.isInvertible()) {
      throw std::invalid_argument("word_ball: rep of '" + gen.name + "' is not invertible");
    }
    by_letter[c] = &gen;
    letter_rep[c] = gen.rep;
    letter_rep[flip_case(c)] = lu.inverse();
    letter_action[c] = gen.action;
    letter_action[flip_case(c)] = invert(gen.action);
  }

  // Breadth-first enumeration of reduced words up to the radius.
  std::vector<std::string> words = {""};
  std::map<std::string, int> index = {{"", 0}};
  std::deque<std::string> frontier = {""};
  while (!frontier.empty()) {
    const std::string w = frontier.front();
    frontier.pop_front();
    for (const auto& [letter, rep] : letter_rep) {
      (void)rep;
      const std::string reduced = reduce_word(w + letter, relations);
      if (static_cast<int>(reduced.size()) > radius || index.count(reduced)) {
        continue;
      }
      index[reduced] = static_cast<int>(words.size());
      words.push_back(reduced);
      frontier.push_back(reduced);
    }
  }

  GroupSystem g;
  const size_t n = words.size();
  g.ids_.reserve(n);
  g.reps_.reserve(n);
  g.actions_.reserve(n);
  g.lengths_.reserve(n);
  for (const auto& w : words) {
    g.ids_.push_back(word_id(w));
    g.lengths_.push_back(static_cast<int>(w.size()));
    Matrix rep = Matrix::Identity(d, d);
    Permutation action(static_cast<size_t>(n_atoms));
    for (Index i = 0; i < n_atoms; ++i) {
      action[static_cast<size_t>(i)] = i;
    }
    for (char letter : w) {
      rep = rep * letter_rep.at(letter);
      action = compose(letter_action.at(letter), action);  // sigma_w o sigma_letter
    }
    g.reps_.push_back(std::move(rep));
    g.actions_.push_back(std::move(action));
  }

  g.mul_.assign(n, std::vector<int>(n, -1));
  g.inv_.assign(n, -1);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      const std::string reduced = reduce_word(words[i] + words[j], relations);
      const auto it = index.find(reduced);
      g.mul_[i][j] = it == index.end() ? -1 : it->second;
    }
    std::string inv_word;
    for (auto it = words[i].rbegin(); it != words[i].rend(); ++it) {
      inv_word.push_back(flip_case(*it));
    }
    const auto it = index.find(reduce_word(inv_word, relations));
    g.inv_[i] = it == index.end() ? -1 : it->second;
  }

  g.identity_ = 0;
  g.n_atoms_ = n_atoms;
  g.truncated_ = true;
  g.complex_structure_ = std::move(complex_structure);
  g.validate(space);
  return g;
}

}  // namespace equifact
