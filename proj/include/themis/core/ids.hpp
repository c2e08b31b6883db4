#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace themis {

enum class ArtifactKind : int {
    turn = 0,
    chunk = 1,
    quote = 2,
    code = 3,
    subtheme = 4,
    theme = 5,
};

constexpr int kArtifactKindCount = 6;

const char* kind_name(ArtifactKind k);
const char* kind_prefix(ArtifactKind k); // "tid", "chid", "qid", "cid", "sid", "thid"
std::optional<ArtifactKind> kind_from_name(std::string_view name);

// Persistent artifact identifier. Serials start at 1, are never reused
// (deletion tombstones, never frees), and render as prefix + zero-padded
// serial, e.g. "cid_000014".
struct ArtifactId {
    ArtifactKind kind = ArtifactKind::turn;
    std::uint64_t serial = 0;

    bool valid() const { return serial > 0; }
    std::string str() const;
    static std::optional<ArtifactId> parse(std::string_view s);

    auto operator<=>(const ArtifactId&) const = default;
};

// Per-kind monotone serial counters for one run.
class IdAllocator {
public:
    IdAllocator() { next_.fill(1); }

    ArtifactId fresh(ArtifactKind kind) {
        auto& n = next_[static_cast<std::size_t>(kind)];
        return ArtifactId{kind, n++};
    }

    // Ensures future serials stay above an id observed from a loaded ledger.
    void bump_past(const ArtifactId& id) {
        auto& n = next_[static_cast<std::size_t>(id.kind)];
        if (id.serial >= n) n = id.serial + 1;
    }

    std::uint64_t peek(ArtifactKind kind) const {
        return next_[static_cast<std::size_t>(kind)];
    }

private:
    std::array<std::uint64_t, kArtifactKindCount> next_;
};

} // namespace themis
