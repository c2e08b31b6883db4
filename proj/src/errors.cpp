#include "themis/errors.hpp"

namespace themis {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::unknown_artifact: return "UnknownArtifact";
        case Errc::ledger_sealed: return "LedgerSealed";
        case Errc::corrupt_ledger: return "CorruptLedger";
        case Errc::empty_document: return "EmptyDocument";
        case Errc::invalid_config: return "InvalidConfig";
        case Errc::too_few_chunks: return "TooFewChunks";
        case Errc::backend_unavailable: return "BackendUnavailable";
        case Errc::malformed_response: return "MalformedResponse";
        case Errc::invalid_request: return "InvalidRequest";
        case Errc::grounding_failure: return "GroundingFailure";
        case Errc::invalid_edit: return "InvalidEdit";
        case Errc::empty_codebook: return "EmptyCodebook";
        case Errc::zero_vector: return "ZeroVector";
        case Errc::dimension_mismatch: return "DimensionMismatch";
        case Errc::empty_text: return "EmptyText";
        case Errc::empty_distribution: return "EmptyDistribution";
        case Errc::weight_sum_invalid: return "WeightSumInvalid";
        case Errc::empty_theme_list: return "EmptyThemeList";
        case Errc::unknown_config_key: return "UnknownConfigKey";
        case Errc::io_error: return "IoError";
        case Errc::corpus_error: return "CorpusError";
    }
    return "Error";
}

Error::Error(Errc code, const std::string& msg)
    : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

void raise(Errc code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace themis
