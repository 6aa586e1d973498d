// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ssrs/core.hpp"

namespace ssrs {

/// Stacked precoder vec([f_c, f_1, ..., f_K]) (HasCommon) or vec([f_1, ..., f_K]).
template <bool HasCommon>
class BasicPrecoderStack {
 public:
  static constexpr bool kHasCommon = HasCommon;

  BasicPrecoderStack() = default;
  BasicPrecoderStack(Index n_antennas, Index n_users)
      : layout_{n_antennas, n_users, HasCommon}, entries_(CVec::Zero(layout_.dim())) {}
  BasicPrecoderStack(Index n_antennas, Index n_users, CVec entries)
      : layout_{n_antennas, n_users, HasCommon}, entries_(std::move(entries)) {
    if (entries_.size() != layout_.dim()) throw InvalidArgument("PrecoderStack: entry count does not match layout");
  }

  const BlockLayout& layout() const { return layout_; }
  Index n_antennas() const { return layout_.n_antennas; }
  Index n_users() const { return layout_.n_users; }

  const CVec& entries() const { return entries_; }
  CVec& entries() { return entries_; }

  auto block(Index b) { return entries_.segment(b * layout_.n_antennas, layout_.n_antennas); }
  auto block(Index b) const { return entries_.segment(b * layout_.n_antennas, layout_.n_antennas); }

  auto common() requires HasCommon { return block(0); }
  auto common() const requires HasCommon { return block(0); }
  auto stream(Index k) { return block(layout_.private_block(k)); }
  auto stream(Index k) const { return block(layout_.private_block(k)); }

  double norm() const { return entries_.norm(); }

  /// Scale to unit norm. A zero stack is left untouched and reported.
  bool normalize() {
    const double n = entries_.norm();
    if (!(n > 0.0) || !std::isfinite(n)) return false;
    entries_ /= n;
    return true;
  }

 private:
  BlockLayout layout_{};
  CVec entries_;
};

using PrecoderStack = BasicPrecoderStack<true>;
using SdmaPrecoderStack = BasicPrecoderStack<false>;

/// Embed an SDMA stack into the RSMA layout with f_c = 0.
inline PrecoderStack with_zero_common(const SdmaPrecoderStack& sdma) {
  PrecoderStack out(sdma.n_antennas(), sdma.n_users());
  for (Index k = 0; k < sdma.n_users(); ++k) out.stream(k) = sdma.stream(k);
  return out;
}

/// Private streams of an RSMA stack, common stream dropped.
inline SdmaPrecoderStack private_part(const PrecoderStack& rsma) {
  SdmaPrecoderStack out(rsma.n_antennas(), rsma.n_users());
  for (Index k = 0; k < rsma.n_users(); ++k) out.stream(k) = rsma.stream(k);
  return out;
}

}  // namespace ssrs
