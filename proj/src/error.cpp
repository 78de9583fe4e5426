// Copyright 2026 The Footfall Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "footfall/error.hpp"

namespace footfall {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kUnsupportedSampleRate: return "UnsupportedSampleRate";
    case Errc::kChannelCountMismatch: return "ChannelCountMismatch";
    case Errc::kMalformedFile: return "MalformedFile";
    case Errc::kSilentClip: return "SilentClip";
    case Errc::kRecordingTooShort: return "RecordingTooShort";
    case Errc::kWrongLength: return "WrongLength";
    case Errc::kInsufficientEmptyAudio: return "InsufficientEmptyAudio";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kOutOfRange: return "OutOfRange";
    case Errc::kDegenerateDirection: return "DegenerateDirection";
    case Errc::kDegenerateSignal: return "DegenerateSignal";
    case Errc::kCoincidentPosition: return "CoincidentPosition";
    case Errc::kMissingLabel: return "MissingLabel";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kMalformedLabel: return "MalformedLabel";
    case Errc::kEmptyDataset: return "EmptyDataset";
    case Errc::kNoEmptySamples: return "NoEmptySamples";
    case Errc::kInvalidTrajectory: return "InvalidTrajectory";
    case Errc::kGeometryMissing: return "GeometryMissing";
    case Errc::kIoFailure: return "IoFailure";
    case Errc::kInsufficientRooms: return "InsufficientRooms";
    case Errc::kMissingEmptyProfile: return "MissingEmptyProfile";
    case Errc::kSourceUnderrun: return "SourceUnderrun";
    case Errc::kSinkFailure: return "SinkFailure";
    case Errc::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace footfall
