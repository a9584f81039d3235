#pragma once

namespace opseq {

enum class Mode { train, eval };

}  // namespace opseq
