#include "pcmsim/address_map.hpp"

#include <algorithm>
#include <sstream>

namespace pcmsim {

std::string_view to_string(AddressField f) {
    switch (f) {
        case AddressField::Channel: return "channel";
        case AddressField::Rank: return "rank";
        case AddressField::Bank: return "bank";
        case AddressField::Partition: return "partition";
        case AddressField::Row: return "row";
        case AddressField::Column: return "column";
        case AddressField::Byte: return "byte";
    }
    return "?";
}

std::optional<AddressField> parse_address_field(std::string_view name) {
    for (auto f : kAllAddressFields) {
        if (to_string(f) == name) return f;
    }
    return std::nullopt;
}

std::uint32_t DecodedAddress::get(AddressField f) const {
    switch (f) {
        case AddressField::Channel: return channel;
        case AddressField::Rank: return rank;
        case AddressField::Bank: return bank;
        case AddressField::Partition: return partition;
        case AddressField::Row: return row;
        case AddressField::Column: return column;
        case AddressField::Byte: return byte_in_line;
    }
    return 0;
}

void DecodedAddress::set(AddressField f, std::uint32_t v) {
    switch (f) {
        case AddressField::Channel: channel = v; break;
        case AddressField::Rank: rank = v; break;
        case AddressField::Bank: bank = v; break;
        case AddressField::Partition: partition = v; break;
        case AddressField::Row: row = v; break;
        case AddressField::Column: column = v; break;
        case AddressField::Byte: byte_in_line = v; break;
    }
}

std::string_view to_string(SchemeName n) {
    switch (n) {
        case SchemeName::DefaultMicron: return "DEFAULT_MICRON";
        case SchemeName::RowInterleaved: return "ROW_INTERLEAVED";
        case SchemeName::BlockInterleaved: return "BLOCK_INTERLEAVED";
        case SchemeName::Custom: return "CUSTOM";
    }
    return "?";
}

std::optional<SchemeName> parse_scheme_name(std::string_view name) {
    for (auto n : {SchemeName::DefaultMicron, SchemeName::RowInterleaved,
                   SchemeName::BlockInterleaved, SchemeName::Custom}) {
        if (to_string(n) == name) return n;
    }
    return std::nullopt;
}

namespace {

std::uint32_t field_bound(AddressField f, const Geometry& g) {
    switch (f) {
        case AddressField::Channel: return g.channels;
        case AddressField::Rank: return g.ranks_per_channel;
        case AddressField::Bank: return g.banks_per_rank;
        case AddressField::Partition: return g.partitions_per_bank;
        case AddressField::Row: return g.rows_per_partition;
        case AddressField::Column: return g.columns_per_row;
        case AddressField::Byte: return 0;  // set by the scheme, not the geometry
    }
    return 0;
}

// Field order from the most significant bit down.
std::vector<AddressField> layout_order(SchemeName name) {
    using F = AddressField;
    switch (name) {
        case SchemeName::DefaultMicron:
            return {F::Rank, F::Row, F::Column, F::Partition, F::Bank, F::Channel, F::Byte};
        case SchemeName::RowInterleaved:
            // consecutive lines stay inside one row
            return {F::Row, F::Rank, F::Bank, F::Partition, F::Channel, F::Column, F::Byte};
        case SchemeName::BlockInterleaved:
            // consecutive lines rotate across banks, then channels
            return {F::Row, F::Column, F::Rank, F::Partition, F::Channel, F::Bank, F::Byte};
        case SchemeName::Custom: break;
    }
    throw ConfigError("CUSTOM mapping has no built-in layout; supply explicit bit ranges");
}

}  // namespace

MappingScheme::MappingScheme(SchemeName name, std::vector<BitRange> ranges)
    : name_(name), ranges_(std::move(ranges)) {
    for (auto f : kAllAddressFields) {
        auto n = std::count_if(ranges_.begin(), ranges_.end(),
                               [f](const BitRange& r) { return r.field == f; });
        if (n > 1) {
            throw ConfigError("mapping assigns field '" + std::string(to_string(f)) + "' twice");
        }
        if (n == 0) ranges_.push_back({f, 0, 0});
    }
    std::stable_sort(ranges_.begin(), ranges_.end(), [](const BitRange& a, const BitRange& b) {
        return a.lsb + a.width > b.lsb + b.width;
    });
    unsigned expected_lsb = 0;
    for (auto it = ranges_.rbegin(); it != ranges_.rend(); ++it) {
        if (it->width == 0) {
            it->lsb = 0;
            continue;
        }
        if (it->width > 32) {
            throw ConfigError("mapping field '" + std::string(to_string(it->field)) +
                              "' is wider than 32 bits");
        }
        if (it->lsb != expected_lsb) {
            throw ConfigError("mapping bit ranges must be disjoint and contiguous from bit 0 (gap or "
                              "overlap at bit " + std::to_string(expected_lsb) + ")");
        }
        expected_lsb = it->lsb + it->width;
    }
    if (expected_lsb > 64) throw ConfigError("mapping wider than 64 bits");
    width_ = expected_lsb;
}

MappingScheme::MappingScheme() : MappingScheme(named(SchemeName::DefaultMicron, Geometry{})) {}

MappingScheme MappingScheme::named(SchemeName name, const Geometry& g, unsigned line_offset_bits) {
    g.validate();
    std::vector<BitRange> ranges;
    auto order = layout_order(name);
    unsigned lsb = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        unsigned w = *it == AddressField::Byte ? line_offset_bits : log2_exact(field_bound(*it, g));
        ranges.push_back({*it, w == 0 ? 0 : lsb, w});
        lsb += w;
    }
    return MappingScheme(name, std::move(ranges));
}

MappingScheme MappingScheme::custom(std::vector<BitRange> ranges) {
    return MappingScheme(SchemeName::Custom, std::move(ranges));
}

const BitRange& MappingScheme::range_of(AddressField f) const {
    for (const auto& r : ranges_) {
        if (r.field == f) return r;
    }
    throw ConfigError("field missing from mapping");  // unreachable after construction
}

void MappingScheme::check_geometry(const Geometry& g) const {
    for (const auto& r : ranges_) {
        if (r.field == AddressField::Byte) continue;
        auto bound = field_bound(r.field, g);
        if (std::uint64_t{1} << r.width != bound) {
            std::ostringstream os;
            os << "mapping gives field '" << to_string(r.field) << "' " << r.width
               << " bits but geometry bound is " << bound;
            throw SchemeGeometryMismatch(os.str());
        }
    }
}

DecodedAddress decode(Address addr, const MappingScheme& scheme, const Geometry& g) {
    scheme.check_geometry(g);
    const unsigned width = scheme.address_width();
    if (width < 64 && (addr >> width) != 0) {
        std::ostringstream os;
        os << "address 0x" << std::hex << addr << " exceeds the " << std::dec << width
           << "-bit mapping";
        throw AddressOutOfRange(os.str());
    }
    DecodedAddress d;
    for (const auto& r : scheme.ranges()) {
        if (r.width == 0) {
            d.set(r.field, 0);
            continue;
        }
        const std::uint64_t mask = (std::uint64_t{1} << r.width) - 1;
        d.set(r.field, static_cast<std::uint32_t>((addr >> r.lsb) & mask));
    }
    return d;
}

Address encode(const DecodedAddress& d, const MappingScheme& scheme, const Geometry& g) {
    scheme.check_geometry(g);
    Address addr = 0;
    for (const auto& r : scheme.ranges()) {
        const std::uint64_t v = d.get(r.field);
        if ((v >> r.width) != 0) {
            throw FieldOutOfRange("field '" + std::string(to_string(r.field)) + "' value " +
                                  std::to_string(v) + " does not fit in " +
                                  std::to_string(r.width) + " bits");
        }
        addr |= v << r.lsb;
    }
    return addr;
}

std::string_view to_string(ConflictKind k) {
    switch (k) {
        case ConflictKind::None: return "none";
        case ConflictKind::RR: return "RR";
        case ConflictKind::RW: return "RW";
        case ConflictKind::WW: return "WW";
    }
    return "?";
}

ConflictKind conflict_kind(const DecodedAddress& a, AccessKind ka, const DecodedAddress& b,
                           AccessKind kb) {
    if (!a.same_bank(b)) return ConflictKind::None;
    if (ka != kb) return ConflictKind::RW;
    return ka == AccessKind::Read ? ConflictKind::RR : ConflictKind::WW;
}

}  // namespace pcmsim
