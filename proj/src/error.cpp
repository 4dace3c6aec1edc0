#include "stegbench/error.hpp"

namespace stegbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TrainingDataEmpty: return "TrainingDataEmpty";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::EmptySentence: return "EmptySentence";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::TruncatedStego: return "TruncatedStego";
    case ErrorCode::DesyncError: return "DesyncError";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateStats: return "DegenerateStats";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DegenerateTrainingSet: return "DegenerateTrainingSet";
    case ErrorCode::FeatureShapeMismatch: return "FeatureShapeMismatch";
    case ErrorCode::EmptyCounts: return "EmptyCounts";
    case ErrorCode::UndefinedMetric: return "UndefinedMetric";
    case ErrorCode::InvalidTemplate: return "InvalidTemplate";
    case ErrorCode::DegenerateDataset: return "DegenerateDataset";
    case ErrorCode::GenerationStalled: return "GenerationStalled";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

}  // namespace stegbench
