# Copyright 2026 The ecr Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the ecr reasoner."""

import json

from ._ecr import Domain, Error, Network, Pool, Service, parse_domain, pretty_print

__all__ = ["Domain", "Error", "Network", "Pool", "Service", "parse_domain", "pretty_print", "request"]


def request(service, method, path, body=None, **query):
    """Sends one API request; returns (status, decoded JSON or None)."""
    text = "" if body is None else json.dumps(body)
    return service.handle(method, path, text, {k: str(v) for k, v in query.items()})
