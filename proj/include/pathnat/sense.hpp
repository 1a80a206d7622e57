#pragma once
// Sense scores for path vertices and edges.
//
// Each sense is described by a word sense profile (WSP): synonyms, IsA and
// HasA neighbours and definition content words. Word/sense similarity is the
// mean word/word similarity over the 10 profile words closest to the word.
// A path is disambiguated vertex by vertex against its neighbours, and the
// vertex/edge scores measure how far the chosen senses fall short of the
// per-neighbour best senses.

#include "pathnat/embed.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pathnat {

inline constexpr std::size_t kWspTopK = 10;

struct Sense {
    std::string word;
    int id = 0;
    std::vector<std::string> wsp;
};

class SenseInventory {
public:
    /// Line format: `word<TAB>sense_id<TAB>wsp_word,wsp_word,...`.
    static SenseInventory load(const std::filesystem::path& file);
    static SenseInventory parse(std::istream& in, const std::string& name = "<stream>");

    /// Keeps senses of a word ordered by id. Duplicate profile words are
    /// dropped; an empty profile is an error.
    void add(Sense sense);

    /// Null when the word has no senses.
    const std::vector<Sense>* senses(std::string_view word) const;
    std::size_t word_count() const { return by_word_.size(); }

private:
    std::unordered_map<std::string, std::vector<Sense>> by_word_;
};

/// Per path vertex: index into that word's sense list, or nullopt when the
/// word is not in the inventory.
using SenseAssignment = std::vector<std::optional<std::size_t>>;

class SenseScorer {
public:
    SenseScorer(const EmbeddingTable& table, const SenseInventory& inventory)
        : table_(table), inventory_(inventory) {}

    /// (cosine + 1) / 2, in [0, 1].
    double word_word(std::string_view w1, std::string_view w2) const;
    double word_sense(std::string_view word, const Sense& sense) const;

    SenseAssignment disambiguate(std::span<const std::string> words) const;

    /// Score of vertex i; 1 at the path ends and for unassigned words.
    double vertex_score(std::span<const std::string> words, const SenseAssignment& a, std::size_t i) const;

    /// Score of the edge joining vertices i and i+1; 1 if either end is unassigned.
    double edge_score(std::span<const std::string> words, const SenseAssignment& a, std::size_t i) const;

    const SenseInventory& inventory() const { return inventory_; }

private:
    double best_sense(std::string_view neighbour, const std::vector<Sense>& senses) const;

    const EmbeddingTable& table_;
    const SenseInventory& inventory_;
};

}  // namespace pathnat
