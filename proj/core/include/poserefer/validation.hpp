#pragma once

#include "poserefer/affordance.hpp"
#include "poserefer/embedding.hpp"
#include "poserefer/types.hpp"

#include <string_view>
#include <vector>

namespace poserefer {

enum class RejectReason {
  None,
  MissingScene,
  MissingTrack,
  MissingTarget,
  MissingTextFeatures,
  InvalidTiming,
  HoldOutOfRange,
  EmptyArmWindow,
  EmptyHeadBodyWindow,
};

std::string_view to_string(RejectReason r);

struct ReferenceCheck {
  RejectReason reason = RejectReason::None;
  bool accepted() const { return reason == RejectReason::None; }
};

// Accepts iff the target resolves, the utterance key is embedded and both
// pooling windows are non-empty after clamping. Rejection is a value.
ReferenceCheck validate_reference(const ReferenceEvent& event, const Dataset& dataset,
                                  const EmbeddingStore& embed, const KernelConfig& kernel = {});

struct FilterSummary {
  std::vector<ReferenceEvent> accepted;
  std::vector<std::pair<std::string, RejectReason>> rejected;  // (ref_id, reason)
};

FilterSummary filter_references(const Dataset& dataset, const EmbeddingStore& embed,
                                const KernelConfig& kernel = {});

}  // namespace poserefer
