#pragma once

#include <qcidgram/bundle.hpp>
#include <qcidgram/graph.hpp>

#include <string>
#include <vector>

namespace fixtures {

inline const std::string pack_dir = QCIDGRAM_PACK_DIR;
inline const std::string data_dir = QCIDGRAM_TEST_DATA;

/// The shipped medical bundle, loaded once per process.
const qcidgram::Bundle& medical();

/// The four-node appendicitis model as stored in the pack's examples.
qcidgram::LabeledGraph appendicitis_expected();

/// The bundle taxonomy plus the variant labels the appendicitis model introduces.
qcidgram::Taxonomy appendicitis_taxonomy();

std::vector<qcidgram::Symbol> symbols(const std::vector<std::string>& texts);

/// Terms listed in a pack example file ({"terms": [...]}).
std::vector<qcidgram::Symbol> example_terms(const std::string& file);

} // namespace fixtures
