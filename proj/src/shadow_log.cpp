#include <cstring>
#include <sstream>

#include "ddbst/estimator.hpp"

namespace ddbst {

namespace {

constexpr char kMagic[8] = {'D', 'D', 'B', 'S', 'H', 'A', 'D', '1'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * i)));
    }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        v |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
    }
    return static_cast<T>(v);
}

} // namespace

unsigned shadow_bits_per_record(Index d) {
    check_dim(d);
    const auto target = 2 * static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(d);
    unsigned bits = 0;
    while ((std::uint64_t{1} << bits) < target) ++bits;
    return bits;
}

std::vector<std::uint8_t> serialize_shadow(std::span<const ShotRecord> log, Index d) {
    if (log.empty()) throw InvalidParameter("cannot serialize an empty shadow log");
    const unsigned bits = shadow_bits_per_record(d);
    const std::uint64_t first = log.front().shot_index;
    for (std::size_t i = 0; i < log.size(); ++i) {
        if (log[i].shot_index != first + i) {
            throw InvalidParameter("shadow log shot indices must be consecutive");
        }
    }

    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    put_le<std::uint32_t>(out, bits);
    put_le<std::uint64_t>(out, log.size());
    put_le<std::uint64_t>(out, first);

    const std::uint64_t payload_bits = static_cast<std::uint64_t>(bits) * log.size();
    const std::size_t header = out.size();
    out.resize(header + (payload_bits + 7) / 8, 0);
    std::uint64_t pos = 0;
    for (const auto& rec : log) {
        const std::uint64_t code = snapshot_index(rec.snapshot, d);
        for (unsigned b = 0; b < bits; ++b, ++pos) {
            if ((code >> b) & 1u) out[header + pos / 8] |= static_cast<std::uint8_t>(1u << (pos % 8));
        }
    }
    return out;
}

ShadowLog deserialize_shadow(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kShadowHeaderBytes) throw ShadowFramingError("truncated header", 0);
    if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw ShadowFramingError("bad magic", 0);
    }
    const auto d = static_cast<Index>(get_le<std::uint32_t>(bytes, 8));
    const auto bits = get_le<std::uint32_t>(bytes, 12);
    const auto count = get_le<std::uint64_t>(bytes, 16);
    const auto first = get_le<std::uint64_t>(bytes, 24);
    if (d < 2 || d > kMaxDim) throw ShadowFramingError("bad dimension in header", 0);
    if (bits != shadow_bits_per_record(d)) throw ShadowFramingError("bad record width", 0);

    const auto payload = bytes.subspan(kShadowHeaderBytes);
    const std::uint64_t expected = (static_cast<std::uint64_t>(bits) * count + 7) / 8;
    if (payload.size() < expected) {
        const std::uint64_t complete = payload.size() * 8 / bits;
        throw ShadowFramingError("truncated payload", complete);
    }
    if (payload.size() > expected) throw ShadowFramingError("trailing bytes after payload", count);

    ShadowLog out;
    out.dim = d;
    out.records.reserve(count);
    const std::uint64_t limit = snapshot_count(d);
    std::uint64_t pos = 0;
    for (std::uint64_t r = 0; r < count; ++r) {
        std::uint64_t code = 0;
        for (unsigned b = 0; b < bits; ++b, ++pos) {
            code |= static_cast<std::uint64_t>((payload[pos / 8] >> (pos % 8)) & 1u) << b;
        }
        if (code >= limit) throw ShadowFramingError("snapshot code out of range", r);
        out.records.push_back({snapshot_from_index(code, d), first + r});
    }
    return out;
}

std::string shadow_to_csv(std::span<const ShotRecord> log) {
    std::ostringstream os;
    os << "shot_index,kind,i,j\n";
    for (const auto& rec : log) {
        os << rec.shot_index << ',' << kind_name(rec.snapshot.kind) << ',' << rec.snapshot.j << ','
           << rec.snapshot.k << '\n';
    }
    return os.str();
}

} // namespace ddbst
