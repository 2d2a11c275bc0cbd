package net;

public class FloatingIpRenew {
    public IpAddress renew(Network network, String zone) {
        IpAddress ip = network.acquireAddress(zone);
        if (ip == null) {
            throw new IllegalStateException("no address left in " + zone);
        }
        ip.setState(State.ALLOCATED);
        store.persist(ip);
        return ip;
    }
}
