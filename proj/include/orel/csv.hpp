#pragma once

#include "orel/engine.hpp"

namespace orel {

/// Parses a comma-separated file with a header row of unsigned decimal
/// integers into a plain table; pads with dummy rows up to `pad_to` if given.
PlainTable ingest_csv(const std::string& path, const std::vector<PlainColumn>& schema, std::size_t pad_to = 0);

void write_csv(const ClearTable& t, std::ostream& os);

/// Writes one share file per party: `<path>.p0/.p1/.p2`.
/// Format: magic "OSH1", schema hash, row count, per-column (name, width,
/// encoding), then validity and column share pairs as little-endian limbs.
void write_share_files(const PlainTable& t, const std::string& path_prefix, u64 dealer_seed);

/// Reads one party's share file back into its table view.
SecretTable read_share_file(const std::string& path, int party);

}  // namespace orel
