#include "poserefer/validation.hpp"

namespace poserefer {

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::None: return "accepted";
    case RejectReason::MissingScene: return "missing_scene";
    case RejectReason::MissingTrack: return "missing_track";
    case RejectReason::MissingTarget: return "missing_target";
    case RejectReason::MissingTextFeatures: return "missing_text_features";
    case RejectReason::InvalidTiming: return "invalid_timing";
    case RejectReason::HoldOutOfRange: return "hold_out_of_range";
    case RejectReason::EmptyArmWindow: return "empty_arm_window";
    case RejectReason::EmptyHeadBodyWindow: return "empty_head_body_window";
  }
  return "?";
}

ReferenceCheck validate_reference(const ReferenceEvent& event, const Dataset& dataset,
                                  const EmbeddingStore& embed, const KernelConfig& kernel) {
  auto scene = dataset.scenes.find(event.room_id);
  if (scene == dataset.scenes.end()) return {RejectReason::MissingScene};
  if (!scene->second.index_of(event.target_id)) return {RejectReason::MissingTarget};
  auto track = dataset.tracks.find(event.ref_id);
  if (track == dataset.tracks.end() || track->second.frames.empty() || !(track->second.fps > 0)) {
    return {RejectReason::MissingTrack};
  }
  if (!embed.contains(event.utterance_key)) return {RejectReason::MissingTextFeatures};
  if (!(event.phrase_start_s <= event.phrase_end_s)) return {RejectReason::InvalidTiming};
  if (event.hold_frame < 0 ||
      event.hold_frame >= static_cast<long>(track->second.frames.size())) {
    return {RejectReason::HoldOutOfRange};
  }
  try {
    frame_window(event, track->second, WindowKind::Arm, kernel);
  } catch (const EmptyWindowError&) {
    return {RejectReason::EmptyArmWindow};
  }
  try {
    frame_window(event, track->second, WindowKind::HeadBody, kernel);
  } catch (const EmptyWindowError&) {
    return {RejectReason::EmptyHeadBodyWindow};
  }
  return {};
}

FilterSummary filter_references(const Dataset& dataset, const EmbeddingStore& embed,
                                const KernelConfig& kernel) {
  FilterSummary out;
  for (const auto& e : dataset.events) {
    const ReferenceCheck check = validate_reference(e, dataset, embed, kernel);
    if (check.accepted()) {
      out.accepted.push_back(e);
    } else {
      out.rejected.emplace_back(e.ref_id, check.reason);
    }
  }
  return out;
}

}  // namespace poserefer
