#pragma once

namespace fedprov::testing {

/// The stock mapping document shipped with the service: the federated
/// identifier becomes the local user name unchanged, in the default domain.
inline constexpr const char* kReferenceMappingDocument = R"({
"mapping": {
"rules": [
  {
    "local": [
      {
        "user": {
          "domain": {
            "id": "default"
          },
          "type": "local",
          "name": "{0}"
        }
      }
    ],
    "remote": [
      {
        "type": "eppn"
      }
    ]
  }
]
}
})";

}  // namespace fedprov::testing
