#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dtl/finite_model.hpp"
#include "dtl/frames.hpp"
#include "dtl/quasimodel.hpp"
#include "dtl/temporal.hpp"

namespace dtl {

/// Malformed document: bad JSON, unknown ids, or types that do not fit
/// the closure.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A frame document before its types are interpreted.
///
///   {"worlds":[{"id":0,"type":["p","[]p"]},...], "order":[[0,1],...],
///    "root":0, "g":[[0,0],...]}
///
/// Ids are integers or strings; "root" and "g" are optional. Pairs refer to
/// ids. Worlds are numbered in the order listed.
struct RawFrame {
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> types;
  std::vector<Row> order;           // reflexive-transitive closure of the input
  bool order_was_closed = true;     // false if closing it added pairs
  std::optional<std::size_t> root;
  std::optional<std::vector<Row>> g;
};

RawFrame parse_raw_frame(std::string_view text);

/// Types are completed from their listed members with complete_type.
TypedFrame build_typed_frame(const RawFrame& raw, const ClosurePtr& c);

/// Warnings (order closure) are appended to `warnings` when given.
TypedFrame typed_frame_from_json(std::string_view text, const ClosurePtr& c,
                                 std::vector<std::string>* warnings = nullptr);
LocalFrame local_frame_from_json(std::string_view text, const ClosurePtr& c,
                                 std::vector<std::string>* warnings = nullptr);
/// Requires "g".
Quasimodel quasimodel_from_json(std::string_view text, const ClosurePtr& c,
                                std::vector<std::string>* warnings = nullptr);

/// {"points":n,"order":[[i,j],...],"f":[...],"valuation":{"p":[...]}}.
/// The order is taken as given; validate_model reports defects.
FiniteDynModel model_from_json(std::string_view text);

/// {"source":frame,"target":frame,"pairs":[[i,j],...]}; both frames need a
/// root. Pairs refer to the ids of the respective frames.
FrameRelation relation_from_json(std::string_view text, const ClosurePtr& c,
                                 std::vector<std::string>* warnings = nullptr);

/// Serializations. Types are written as their full member lists, so that
/// reading them back yields the same types.
std::string to_json(const TypedFrame& f, std::optional<std::size_t> root = std::nullopt);
std::string to_json(const LocalFrame& f);
std::string to_json(const Quasimodel& q);
std::string to_json(const FiniteDynModel& m);
std::string to_json(const FrameRelation& r);
std::string to_json(const ValidationReport& report);

/// DOT for a raw document: R as solid edges (reflexive and transitive
/// pairs omitted), g as dashed edges.
std::string raw_frame_to_dot(const RawFrame& raw);

}  // namespace dtl
