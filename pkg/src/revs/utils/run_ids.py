"""Deterministic identifiers for runs."""

import hashlib as _hashlib
import uuid as _uuid


class RunIds:

    @staticmethod
    def config_id(text):
        """Generate a run ID from the canonical text of a scenario config.

        A run ID is the UUID of the SHA-1 hash of the text, so the same config
        always yields the same ID.

        Parameters:
            text: Canonical config text (str or bytes).

        Returns:
            (str) A generated UUID.
        """
        if isinstance(text, str):
            text = text.encode("utf-8")
        hash_ = _hashlib.sha1()
        hash_.update(text)
        bytes_ = hash_.digest()[:16]
        uuid = _uuid.UUID(bytes = bytes_)
        return str(uuid)
