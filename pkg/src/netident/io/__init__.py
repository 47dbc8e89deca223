from .dot import to_dot
from .netfile import Network, NetfileError, dump_network, load_network, network_from, parse_network

__all__ = ["Network", "NetfileError", "dump_network", "load_network", "network_from", "parse_network", "to_dot"]
