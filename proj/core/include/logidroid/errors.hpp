#pragma once

#include <stdexcept>
#include <string>

namespace logidroid {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- knowledge store ---------------------------------------------------
struct EmptyText : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct ZeroVector : Error { using Error::Error; };
struct EmbeddingDimensionMismatch : Error { using Error::Error; };
struct UnknownCategory : Error { using Error::Error; };
struct SummaryRejected : Error { using Error::Error; };
struct StoreError : Error { using Error::Error; };

// --- llm gateway --------------------------------------------------------
struct MissingContextField : Error { using Error::Error; };
struct ProviderUnavailable : Error { using Error::Error; };
struct ScriptExhausted : Error { using Error::Error; };

// --- device -------------------------------------------------------------
struct BackendUnavailable : Error { using Error::Error; };
struct EmptyScreen : Error { using Error::Error; };
struct StaleWidget : Error { using Error::Error; };
struct ActionUnsupported : Error { using Error::Error; };
struct AssertionTargetUnresolved : Error { using Error::Error; };
struct EmptySession : Error { using Error::Error; };
struct InvalidAppModel : Error { using Error::Error; };

// --- decision agent -----------------------------------------------------
struct UnparseableReply : Error { using Error::Error; };
struct InvalidWidgetId : Error { using Error::Error; };
struct StepFailed : Error { using Error::Error; };
struct SessionAborted : Error { using Error::Error; };

// --- evaluation ---------------------------------------------------------
struct NoAnnotations : Error { using Error::Error; };

}  // namespace logidroid
