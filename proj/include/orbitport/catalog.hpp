#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "orbitport/config.hpp"
#include "orbitport/lamination.hpp"
#include "orbitport/polyseq.hpp"
#include "orbitport/portrait.hpp"

namespace orbitport {

// Where an entry's expected value comes from: quoted from the published
// description of the example (printed constants, displayed pairings), or
// computed here from that description.
enum class FactOrigin { Reference, Computed };

std::string to_string(FactOrigin origin);

// One pinned expectation, stored in display form so `show` and `run` agree
// on what is being claimed.
struct ExpectedFact {
    std::string key;   // short slug, e.g. "landing time 0"
    std::string value; // canonical text of the expected object
    FactOrigin origin = FactOrigin::Reference;
};

// A built-in example: a polynomial sequence and/or a formal portrait plus
// the facts the checks below recompute. Combinatorial-only entries carry no
// sequence; measurement-driven entries (the word family) carry no portrait.
struct CatalogEntry {
    std::string id;
    std::string title;
    std::optional<PolynomialSequence> sequence;
    std::optional<FormalPortrait> portrait;
    // Chord pairing for the time-0 critical arc, when the example pins one.
    std::optional<Matching> matching;
    std::vector<ExpectedFact> expected;

    std::string str() const; // multi-line `show` text
};

// The id forms accepted by get_example; the word family is listed once as
// its pattern "word_seq(<word>)".
std::vector<std::string> catalog_ids();

// Build the entry for an id. Word entries are spelled word_seq("010") or
// word_seq(010); the word must be a nonempty string over {0,1}. Unknown ids
// and malformed word specs throw UnknownId.
CatalogEntry get_example(const std::string& id);

struct CatalogCheck {
    std::string name;
    bool ok = false;
    std::string detail; // measured value, or what diverged
};

// Recompute every expected fact of the entry and report each comparison.
// Never throws on a mismatch: failures come back with ok = false so a runner
// can print the full list.
std::vector<CatalogCheck> run_example(const std::string& id,
                                      const Config& cfg = {});

} // namespace orbitport
