#include "themis/core/ids.hpp"

#include <cstdio>

namespace themis {

const char* kind_name(ArtifactKind k) {
    switch (k) {
        case ArtifactKind::turn: return "turn";
        case ArtifactKind::chunk: return "chunk";
        case ArtifactKind::quote: return "quote";
        case ArtifactKind::code: return "code";
        case ArtifactKind::subtheme: return "subtheme";
        case ArtifactKind::theme: return "theme";
    }
    return "?";
}

const char* kind_prefix(ArtifactKind k) {
    switch (k) {
        case ArtifactKind::turn: return "tid";
        case ArtifactKind::chunk: return "chid";
        case ArtifactKind::quote: return "qid";
        case ArtifactKind::code: return "cid";
        case ArtifactKind::subtheme: return "sid";
        case ArtifactKind::theme: return "thid";
    }
    return "?";
}

std::optional<ArtifactKind> kind_from_name(std::string_view name) {
    for (int i = 0; i < kArtifactKindCount; ++i) {
        auto k = static_cast<ArtifactKind>(i);
        if (name == kind_name(k)) return k;
    }
    return std::nullopt;
}

std::string ArtifactId::str() const {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%s_%06llu", kind_prefix(kind),
                  static_cast<unsigned long long>(serial));
    return buf;
}

std::optional<ArtifactId> ArtifactId::parse(std::string_view s) {
    std::size_t us = s.find('_');
    if (us == std::string_view::npos || us == 0 || us + 1 >= s.size()) return std::nullopt;
    std::string_view prefix = s.substr(0, us);
    std::string_view digits = s.substr(us + 1);
    ArtifactKind kind;
    bool found = false;
    for (int i = 0; i < kArtifactKindCount; ++i) {
        auto k = static_cast<ArtifactKind>(i);
        if (prefix == kind_prefix(k)) {
            kind = k;
            found = true;
            break;
        }
    }
    if (!found) return std::nullopt;
    std::uint64_t serial = 0;
    for (char c : digits) {
        if (c < '0' || c > '9') return std::nullopt;
        serial = serial * 10 + static_cast<std::uint64_t>(c - '0');
    }
    if (serial == 0) return std::nullopt;
    return ArtifactId{kind, serial};
}

} // namespace themis
