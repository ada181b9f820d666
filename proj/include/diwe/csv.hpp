#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "diwe/instance.hpp"

namespace diwe {

/// Writes a stream in the interchange layout: header f0..f{n-1},label,
/// full-precision decimal features, integer labels.
void write_stream_csv(const Stream& stream, const std::string& path);

/// How to turn a CSV file into a validated stream.
struct IngestionSpec {
    std::string path;
    /// Column name holding the class. Empty -> "label" if present, else the
    /// last column.
    std::string label_column;
    /// Columns to one-hot expand (expansion happens before normalization).
    std::vector<std::string> nominal_columns;
    /// Min-max normalize each feature to [0,1]. Fit on `fit_prefix` rows
    /// (0 = the whole file). Rows outside the fit range may leave [0,1].
    bool normalize = true;
    std::size_t fit_prefix = 0;
};

/**
 * Reads, one-hot expands, normalizes and validates a CSV file into a
 * Stream, preserving file order; arrival indices are 1-based row numbers.
 * Malformed rows and nominal levels unseen in the fit range raise DataError
 * with the offending line number. Labels: all-integer label columns are
 * used as class indices directly; otherwise values map to indices by first
 * appearance inside the fit range.
 */
Stream ingest_csv(const IngestionSpec& spec);

}  // namespace diwe
