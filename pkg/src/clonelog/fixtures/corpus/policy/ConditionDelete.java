package policy;

public class ConditionDelete {
    private static final Logger LOG = LoggerFactory.getLogger(ConditionDelete.class);

    public void deleteCondition(long policyId, String conditionId) throws PolicyException {
        Policy policy = policyDao.findById(policyId);
        Condition condition = policy.getCondition(conditionId);
        for (Rule rule : condition.getRules()) {
            ruleDao.expunge(rule.getId());
        }
        policy.removeCondition(condition);
        policyDao.update(policy);
        LOG.info("Successfully deleted condition: " + conditionId);
    }
}
