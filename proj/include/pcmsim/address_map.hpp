#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcmsim/common.hpp"
#include "pcmsim/geometry.hpp"

namespace pcmsim {

class AddressOutOfRange : public Error {
public:
    using Error::Error;
};

class SchemeGeometryMismatch : public Error {
public:
    using Error::Error;
};

class FieldOutOfRange : public Error {
public:
    using Error::Error;
};

enum class AddressField { Channel, Rank, Bank, Partition, Row, Column, Byte };

inline constexpr std::array<AddressField, 7> kAllAddressFields = {
    AddressField::Channel, AddressField::Rank, AddressField::Row,  AddressField::Column,
    AddressField::Partition, AddressField::Bank, AddressField::Byte};

std::string_view to_string(AddressField f);
std::optional<AddressField> parse_address_field(std::string_view name);

struct DecodedAddress {
    std::uint32_t channel = 0;
    std::uint32_t rank = 0;
    std::uint32_t bank = 0;
    std::uint32_t partition = 0;
    std::uint32_t row = 0;
    std::uint32_t column = 0;
    std::uint32_t byte_in_line = 0;

    std::uint32_t get(AddressField f) const;
    void set(AddressField f, std::uint32_t v);

    /// ((channel * ranks + rank) * banks_per_rank + bank)
    BankId global_bank(const Geometry& g) const {
        return (channel * g.ranks_per_channel + rank) * g.banks_per_rank + bank;
    }

    bool same_bank(const DecodedAddress& o) const {
        return channel == o.channel && rank == o.rank && bank == o.bank;
    }

    friend bool operator==(const DecodedAddress&, const DecodedAddress&) = default;
};

/// Bits [lsb + width - 1 : lsb] assigned to one field. A field whose bound is
/// 1 has width 0 and always decodes to 0.
struct BitRange {
    AddressField field;
    unsigned lsb = 0;
    unsigned width = 0;

    unsigned msb() const { return lsb + width - 1; }
    friend bool operator==(const BitRange&, const BitRange&) = default;
};

enum class SchemeName { DefaultMicron, RowInterleaved, BlockInterleaved, Custom };

std::string_view to_string(SchemeName n);
std::optional<SchemeName> parse_scheme_name(std::string_view name);

/// Field-to-bit assignment. Ranges are disjoint and cover bits [width-1:0].
class MappingScheme {
public:
    /// DEFAULT_MICRON over the default geometry.
    MappingScheme();

    /// Builds one of the named layouts with field widths taken from the
    /// geometry. For the default geometry, DefaultMicron is
    /// [36:35] rank, [34:23] row, [22:14] column, [13:11] partition,
    /// [10:8] bank, [7:6] channel, [5:0] byte.
    static MappingScheme named(SchemeName name, const Geometry& g, unsigned line_offset_bits = 6);

    /// Arbitrary layout; throws ConfigError if a field appears twice or the
    /// nonempty ranges do not tile [width-1:0] without gaps or overlap.
    /// Omitted fields get width 0.
    static MappingScheme custom(std::vector<BitRange> ranges);

    SchemeName name() const { return name_; }
    unsigned address_width() const { return width_; }
    const std::vector<BitRange>& ranges() const { return ranges_; }
    const BitRange& range_of(AddressField f) const;

    /// Throws SchemeGeometryMismatch unless every field width matches log2 of
    /// its geometry bound.
    void check_geometry(const Geometry& g) const;

private:
    MappingScheme(SchemeName name, std::vector<BitRange> ranges);

    SchemeName name_;
    std::vector<BitRange> ranges_;  // high bits first
    unsigned width_ = 0;
};

DecodedAddress decode(Address addr, const MappingScheme& scheme, const Geometry& g);
Address encode(const DecodedAddress& d, const MappingScheme& scheme, const Geometry& g);

enum class ConflictKind { None, RR, RW, WW };

std::string_view to_string(ConflictKind k);

/// Bank-level classification of two accesses; partitions are ignored.
ConflictKind conflict_kind(const DecodedAddress& a, AccessKind ka, const DecodedAddress& b,
                           AccessKind kb);

}  // namespace pcmsim
