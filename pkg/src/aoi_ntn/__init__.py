"""Age-of-Information models for UAV and satellite relay networks.

Closed-form AoI expressions for multi-stream M/G/1/1 service and for
multi-hop tandem queues with cross traffic, plus a discrete-event simulator
and PPP/PCP spatial sampling used to check them.
"""

__version__ = "0.1.0"
