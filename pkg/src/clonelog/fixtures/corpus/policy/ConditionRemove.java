package policy;

public class ConditionRemove {
    private static final Logger LOG = LoggerFactory.getLogger(ConditionRemove.class);

    public void dropCondition(long policyId, String conditionKey) throws PolicyException {
        Policy policy = policyDao.findById(policyId);
        Condition condition = policy.getCondition(conditionKey);
        for (Rule rule : condition.getRules()) {
            ruleDao.expunge(rule.getId());
        }
        policy.removeCondition(condition);
        policyDao.update(policy);
        LOG.info("Successfully deleted condition: " + conditionKey);
    }
}
