#pragma once

#include <json.hpp>

#include "sft/bounded.hpp"
#include "sft/group.hpp"
#include "sft/subshift.hpp"
#include "sft/synthesis.hpp"
#include "sft/transfer.hpp"

// JSON document schemas. Every top-level input document carries "spec": 1;
// nested objects (groups inside subshift files, etc.) do not repeat it.
namespace sft::io {

using nlohmann::json;

// throws input_error unless doc is an object with "spec": 1
void require_spec(const json& doc);

json group_to_json(const Group& g);
Group group_from_json(const json& j);

json pattern_to_json(const Pattern& p, const std::vector<std::string>& alphabet);
Pattern pattern_from_json(const json& j, const Group& g,
                          const std::vector<std::string>& alphabet);

json sft_to_json(const Sft& x);
Sft sft_from_json(const json& doc);

Homomorphism hom_from_json(const json& doc);
KernelData kernel_from_json(const json& doc);     // needs "kernel_generators"
SectionData sections_from_json(const json& doc);  // needs "sections"

FiniteIndexData finite_index_from_json(const json& doc);

struct ActionSpec {
    Group acting;
    Group space;
    std::vector<Word> displacements;
    TranslationLikeAction action;
    std::vector<Word> relators; // empty = canonical presentation

    DisplacementAlphabet alphabet() const;
    RelatorSet relator_set() const;
};

ActionSpec action_from_json(const json& doc);

// Self-contained configuration document: group, alphabet, and either a
// recognized "config" kind (constant, parity, quotient, tree_automaton,
// finite_orbit) or explicit "cells".
LazyConfiguration config_from_json(const json& doc);

json certificate_to_json(const EmptinessCertificate& cert, const Sft& context);

// Patch document: group, alphabet, the configuration's description fragment,
// explicit cells on ball(radius), and a verification stanza against `x`.
json patch_to_json(const LazyConfiguration& c, int radius, const Sft* x);

} // namespace sft::io
