#pragma once

#include <stdexcept>
#include <string>

namespace themis {

enum class Errc {
    unknown_artifact,
    ledger_sealed,
    corrupt_ledger,
    empty_document,
    invalid_config,
    too_few_chunks,
    backend_unavailable,
    malformed_response,
    invalid_request,
    grounding_failure,
    invalid_edit,
    empty_codebook,
    zero_vector,
    dimension_mismatch,
    empty_text,
    empty_distribution,
    weight_sum_invalid,
    empty_theme_list,
    unknown_config_key,
    io_error,
    corpus_error,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg);
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& msg);

} // namespace themis
