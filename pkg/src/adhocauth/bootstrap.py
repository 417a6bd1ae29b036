"""The trusted bootstrap: key owner, issuer, registry, signer, revoker."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from . import gqid
from .errors import AlreadyRegistered, UnknownID
from .session import identity_digest

ID_LEN = 16


@dataclass
class UserRecord:
    real_identity: str
    issued: list[bytes] = field(default_factory=list)


class Bootstrap:
    def __init__(self, keys: gqid.BootstrapKeys, rng: random.Random):
        self.keys = keys
        self.rng = rng
        self.reachable = True
        self.users: dict[str, UserRecord] = {}
        self._owner: dict[bytes, str] = {}
        self._registry: dict[bytes, bytes] = {}
        self.audit: list[str] = []

    @property
    def params(self) -> gqid.PublicParams:
        return self.keys.public

    def issue_batch(self, user: str, count: int) -> list[gqid.Credential]:
        if count < 1:
            raise ValueError("count must be at least 1")
        record = self.users.setdefault(user, UserRecord(user))
        creds = []
        while len(creds) < count:
            identity = self.rng.randbytes(ID_LEN)
            if identity in self._owner:
                continue
            cred = gqid.issue_credential(self.keys, identity)
            self._owner[identity] = user
            record.issued.append(identity)
            creds.append(cred)
            self.audit.append(f"ISSUE {user} {identity.hex()}")
        return creds

    def register_conversation(self, conversation_id: bytes, identity: bytes) -> None:
        if conversation_id in self._registry:
            raise AlreadyRegistered(conversation_id.hex())
        self._registry[conversation_id] = identity
        self.audit.append(f"REGISTER {conversation_id.hex()} {identity.hex()}")

    def lookup_conversation(self, conversation_id: bytes) -> bytes | None:
        return self._registry.get(conversation_id)

    def sign_identity(self, identity: bytes, h_m: bytes) -> int:
        if identity not in self._owner:
            raise UnknownID(identity.hex())
        self.audit.append(f"SIGN {identity.hex()} {h_m.hex()}")
        return gqid.sign_digest(self.keys, identity_digest(identity, h_m))

    def revoke(self, identity: bytes) -> str | None:
        """Map an ID back to the user it was issued to."""
        user = self._owner.get(identity)
        if user is not None:
            self.audit.append(f"REVOKE {identity.hex()} {user}")
        return user

    def write_audit(self, path: Path) -> None:
        path.write_text("".join(line + "\n" for line in self.audit))
