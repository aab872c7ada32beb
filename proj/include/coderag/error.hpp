#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace coderag {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad or missing input data: empty corpora, unknown ids, malformed stores.
class DataError : public Error {
public:
    using Error::Error;
};

/// A persisted store or index with the wrong header or format version.
class FormatError : public DataError {
public:
    using DataError::DataError;
};

/// Embedding or completion backend failure after retries were exhausted.
class ProviderError : public Error {
public:
    explicit ProviderError(const std::string& what, std::vector<std::size_t> failed = {})
        : Error(what), failed_indices_(std::move(failed)) {}

    /// Input indices (texts for embedding, instances for completion) that failed.
    const std::vector<std::size_t>& failed_indices() const noexcept { return failed_indices_; }

private:
    std::vector<std::size_t> failed_indices_;
};

/// The provider answered, but the payload violates the wire protocol.
class ProtocolError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

/// Too many failed instances in an evaluation run.
class QualityGateError : public Error {
public:
    using Error::Error;
};

} // namespace coderag
