#include "pathnat/sense.hpp"

#include "pathnat/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_set>

namespace pathnat {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double ratio(double num, double den) {
    if (!(den > 0.0)) return 1.0;
    return std::clamp(num / den, 0.0, 1.0);
}

}  // namespace

SenseInventory SenseInventory::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open sense inventory: " + file.string());
    return parse(in, file.string());
}

SenseInventory SenseInventory::parse(std::istream& in, const std::string& name) {
    SenseInventory inv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto t1 = body.find('\t');
        const auto t2 = t1 == std::string_view::npos ? t1 : body.find('\t', t1 + 1);
        if (t2 == std::string_view::npos) throw ParseError(name, lineno, "expected 3 tab-separated columns");
        Sense s;
        s.word = normalize_concept(body.substr(0, t1));
        const auto id_text = trim(body.substr(t1 + 1, t2 - t1 - 1));
        const auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), s.id);
        if (ec != std::errc() || ptr != id_text.data() + id_text.size()) {
            throw ParseError(name, lineno, "bad sense id '" + std::string(id_text) + "'");
        }
        auto rest = body.substr(t2 + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto w = trim(rest.substr(0, comma));
            if (!w.empty()) s.wsp.emplace_back(w);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (s.word.empty()) throw ParseError(name, lineno, "empty word");
        try {
            inv.add(std::move(s));
        } catch (const Error& e) {
            throw ParseError(name, lineno, e.what());
        }
    }
    return inv;
}

void SenseInventory::add(Sense sense) {
    std::unordered_set<std::string> seen;
    std::vector<std::string> unique;
    for (auto& w : sense.wsp) {
        if (seen.insert(w).second) unique.push_back(std::move(w));
    }
    sense.wsp = std::move(unique);
    if (sense.wsp.empty()) throw Error("sense " + std::to_string(sense.id) + " of '" + sense.word + "' has an empty profile");
    auto& list = by_word_[sense.word];
    const auto pos = std::lower_bound(list.begin(), list.end(), sense.id,
                                      [](const Sense& s, int id) { return s.id < id; });
    if (pos != list.end() && pos->id == sense.id) {
        throw Error("duplicate sense " + std::to_string(sense.id) + " for '" + sense.word + "'");
    }
    list.insert(pos, std::move(sense));
}

const std::vector<Sense>* SenseInventory::senses(std::string_view word) const {
    const auto it = by_word_.find(std::string(word));
    return it == by_word_.end() ? nullptr : &it->second;
}

double SenseScorer::word_word(std::string_view w1, std::string_view w2) const {
    const auto a = table_.lookup(w1);
    const auto b = table_.lookup(w2);
    return (cosine(a.values, b.values) + 1.0) / 2.0;
}

double SenseScorer::word_sense(std::string_view word, const Sense& sense) const {
    if (sense.wsp.empty()) throw Error("word_sense: empty profile");
    std::vector<double> sims;
    sims.reserve(sense.wsp.size());
    for (const auto& w : sense.wsp) sims.push_back(word_word(word, w));
    const auto k = std::min(kWspTopK, sims.size());
    std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(k), sims.end(),
                      std::greater<>());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += sims[i];
    return sum / static_cast<double>(k);
}

double SenseScorer::best_sense(std::string_view neighbour, const std::vector<Sense>& senses) const {
    double best = 0.0;
    for (const auto& s : senses) best = std::max(best, word_sense(neighbour, s));
    return best;
}

SenseAssignment SenseScorer::disambiguate(std::span<const std::string> words) const {
    SenseAssignment out(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        const auto* senses = inventory_.senses(words[i]);
        if (!senses) continue;
        std::size_t best = 0;
        double best_value = -1.0;
        for (std::size_t s = 0; s < senses->size(); ++s) {
            double value = 0.0;
            int neighbours = 0;
            if (i > 0) {
                value += word_sense(words[i - 1], (*senses)[s]);
                ++neighbours;
            }
            if (i + 1 < words.size()) {
                value += word_sense(words[i + 1], (*senses)[s]);
                ++neighbours;
            }
            if (neighbours > 0) value /= neighbours;
            // Strict comparison keeps the lowest sense id on ties.
            if (value > best_value) {
                best_value = value;
                best = s;
            }
        }
        out[i] = best;
    }
    return out;
}

double SenseScorer::vertex_score(std::span<const std::string> words, const SenseAssignment& a,
                                 std::size_t i) const {
    if (i >= words.size()) throw Error("vertex_score: index out of range");
    if (i == 0 || i + 1 == words.size() || !a.at(i)) return 1.0;
    const auto& senses = *inventory_.senses(words[i]);
    const auto& chosen = senses.at(*a[i]);
    const double num = word_sense(words[i - 1], chosen) + word_sense(words[i + 1], chosen);
    const double den = best_sense(words[i - 1], senses) + best_sense(words[i + 1], senses);
    return ratio(num, den);
}

double SenseScorer::edge_score(std::span<const std::string> words, const SenseAssignment& a,
                               std::size_t i) const {
    if (i + 1 >= words.size()) throw Error("edge_score: index out of range");
    if (!a.at(i) || !a.at(i + 1)) return 1.0;
    const auto& left = *inventory_.senses(words[i]);
    const auto& right = *inventory_.senses(words[i + 1]);
    const double num = word_sense(words[i], right.at(*a[i + 1])) + word_sense(words[i + 1], left.at(*a[i]));
    const double den = best_sense(words[i], right) + best_sense(words[i + 1], left);
    return ratio(num, den);
}

}  // namespace pathnat
