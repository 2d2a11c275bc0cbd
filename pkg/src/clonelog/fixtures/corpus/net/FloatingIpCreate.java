package net;

public class FloatingIpCreate {
    private static final Logger LOG = LoggerFactory.getLogger(FloatingIpCreate.class);

    public IpAddress allocate(Network network, String zone) {
        IpAddress ip = network.acquireAddress(zone);
        if (ip == null) {
            throw new IllegalStateException("no address left in " + zone);
        }
        ip.setState(State.ALLOCATED);
        store.persist(ip);
        LOG.info("Successfully created floating IP " + ip.getAddress());
        return ip;
    }
}
