package net;

public class FloatingIpDelete {
    private static final Logger LOG = LoggerFactory.getLogger(FloatingIpDelete.class);

    public IpAddress release(Network network, String zone) {
        IpAddress ip = network.findAddress(zone);
        if (ip == null) {
            throw new IllegalStateException("no address left in " + zone);
        }
        ip.setState(State.RELEASED);
        store.persist(ip);
        LOG.info("Successfully deleted floating IP {}", ip.getAddress());
        return ip;
    }
}
