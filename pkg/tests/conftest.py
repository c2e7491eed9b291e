import random

import pytest

from topoman.security import ControllerKeyPair
from topoman.topogen import loads_network_config

LINE_CONFIG = """\
# fw1 -- ids1 -- px1, each end fronting a LAN
[middlebox]
fw1 firewall
  eth0 10.0.0.1/30
  lan0 192.168.0.1/24 edge
ids1 ids
  eth0 10.0.0.2/30
  eth1 10.0.0.5/30
px1 proxy
  eth0 10.0.0.6/30
  lan0 192.168.1.1/24 edge

[island]
edge0 edge0s0
edge1 edge1s0

[link]
fw1:eth0 ids1:eth0
ids1:eth1 px1:eth0
fw1:lan0 edge0s0:p0
px1:lan0 edge1s0:p0

[route]
fw1 0.0.0.0/0 eth0 10.0.0.2
ids1 192.168.0.0/24 eth0 10.0.0.1
ids1 192.168.1.0/24 eth1 10.0.0.6
px1 0.0.0.0/0 eth0 10.0.0.5

[policy]
192.168.0.0/24 -> 192.168.1.0/24 allow
"""


@pytest.fixture
def line_config():
    return LINE_CONFIG


@pytest.fixture
def line_net():
    return loads_network_config(LINE_CONFIG)


@pytest.fixture
def keypair():
    return ControllerKeyPair.generate(random.Random(7))


@pytest.fixture
def rng():
    return random.Random(1234)
