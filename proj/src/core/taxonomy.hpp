#pragma once

#include <optional>
#include <string>
#include <vector>

namespace seqdiag {

struct ErrorType {
    int id = 0; // 0..8
    std::string name;
};

struct ErrorSubtype {
    int id = 0; // 0..28
    std::string name;
    std::string definition;
    int parent = 0; // ErrorType id
};

/// A (type, subtype) pair with subtype.parent == type enforced at
/// construction. Instances are only obtainable through Taxonomy.
struct ErrorLabel {
    int type_id = 0;
    int subtype_id = 0;

    bool operator==(const ErrorLabel&) const = default;
};

/// The fixed two-level error taxonomy: 9 types, 29 subtypes. Immutable and
/// shared; lookups are by normalized (trimmed, whitespace-collapsed) name
/// and otherwise case-sensitive.
class Taxonomy {
public:
    static const Taxonomy& instance();

    const std::vector<ErrorType>& types() const { return types_; }
    const std::vector<ErrorSubtype>& subtypes() const { return subtypes_; }

    const ErrorType& type(int id) const;
    const ErrorSubtype& subtype(int id) const;

    std::optional<int> find_type(const std::string& name) const;
    std::optional<int> find_subtype(const std::string& name) const;

    /// Unique parent type of a registered subtype name. Throws UnknownSubtype.
    const ErrorType& parent_of(const std::string& subtype_name) const;

    /// Global subtype ids belonging to one type, in registry order.
    const std::vector<int>& subtypes_of(int type_id) const;

    /// Position of a subtype within its parent's subtype list.
    int local_index(int subtype_id) const;

    /// Validated label; throws LabelInconsistent if parent does not match.
    ErrorLabel make_label(int type_id, int subtype_id) const;

    /// Label implied by a subtype alone (parent is unique).
    ErrorLabel label_from_subtype(int subtype_id) const;

    static constexpr int kNumTypes = 9;
    static constexpr int kNumSubtypes = 29;

private:
    Taxonomy();

    std::vector<ErrorType> types_;
    std::vector<ErrorSubtype> subtypes_;
    std::vector<std::vector<int>> children_; // per type id
    std::vector<int> local_index_;           // per subtype id
};

} // namespace seqdiag
