package storage;

public class SnapshotDelete {
    private static final Logger LOG = LoggerFactory.getLogger(SnapshotDelete.class);

    public void deleteSnapshots(List<Snapshot> snapshots, boolean force) {
        int removed = 0;
        for (Snapshot snap : snapshots) {
            if (snap.isProtected() && !force) {
                continue;
            }
            snapshotStore.delete(snap.getPath());
            removed++;
        }
        metrics.record("snapshots.removed", removed);
        LOG.debug("Snapshot successfully deleted");
    }
}
